#include "defidx/operators.hpp"

#include <cstdio>
#include <ostream>
#include <vector>

namespace defidx {

SparseSymmetricMatrix::SparseSymmetricMatrix(Eigen::SparseMatrix<double> upper) : upper_(std::move(upper)) {
  if (upper_.rows() != upper_.cols()) throw DomainError("symmetric matrix must be square");
  upper_ = Eigen::SparseMatrix<double>(upper_.triangularView<Eigen::Upper>());
  upper_.prune(0.0);
  upper_.makeCompressed();
}

double SparseSymmetricMatrix::operator()(Index row, Index col) const {
  if (row > col) std::swap(row, col);
  return upper_.coeff(row, col);
}

Eigen::SparseMatrix<double> SparseSymmetricMatrix::full() const {
  return Eigen::SparseMatrix<double>(upper_.selfadjointView<Eigen::Upper>());
}

SparseSymmetricMatrix truncated_matrix(const Graph& g, OperatorKind kind) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(g.edge_count() + g.vertex_count()));
  const double off = kind == OperatorKind::adjacency ? 1.0 : -1.0;
  for (const auto& [u, v] : g.edges()) triplets.emplace_back(u, v, off);
  if (kind == OperatorKind::laplacian) {
    for (Index v = 0; v < g.vertex_count(); ++v) {
      if (const Index d = degree(g, v); d > 0) triplets.emplace_back(v, v, static_cast<double>(d));
    }
  }
  Eigen::SparseMatrix<double> upper(g.vertex_count(), g.vertex_count());
  upper.setFromTriplets(triplets.begin(), triplets.end());
  return SparseSymmetricMatrix(std::move(upper));
}

void write_coordinate(std::ostream& os, const SparseSymmetricMatrix& m) {
  // column-major storage; collect and emit row-major for readability
  std::vector<Eigen::Triplet<double>> entries;
  const auto& u = m.upper();
  for (Index k = 0; k < u.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(u, k); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value());
    os << e.row() << ' ' << e.col() << ' ' << buf << '\n';
  }
}

}  // namespace defidx
