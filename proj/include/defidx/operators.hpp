#pragma once

#include <complex>
#include <iosfwd>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "defidx/graph.hpp"

namespace defidx {

/// Function on the vertices of a truncation; entries at unlisted vertices are 0.
using FiniteFunction = Eigen::VectorXcd;

enum class OperatorKind { adjacency, laplacian };

namespace detail {

template <typename Derived>
void check_applicable(const Graph& g, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != g.vertex_count()) {
    throw DomainError("function has " + std::to_string(f.size()) + " entries, graph has " +
                      std::to_string(g.vertex_count()) + " vertices");
  }
  std::vector<Index> offending;
  for (Index b : g.boundary()) {
    if (f(b) != typename Derived::Scalar(0)) offending.push_back(b);
  }
  if (!offending.empty()) {
    throw TruncationError("operator applied to a function supported on the truncation boundary", std::move(offending));
  }
}

}  // namespace detail

/// (Af)(x) = sum over neighbours y of f(y).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_adjacency(const Graph& g,
                                                                         const Eigen::MatrixBase<Derived>& f) {
  detail::check_applicable(g, f);
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(f.size());
  for (Index x = 0; x < g.vertex_count(); ++x) {
    Scalar acc(0);
    for (Index y : g.neighbors(x)) acc += f(y);
    out(x) = acc;
  }
  return out;
}

/// (Δf)(x) = sum over neighbours y of (f(x) - f(y)).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_laplacian(const Graph& g,
                                                                         const Eigen::MatrixBase<Derived>& f) {
  detail::check_applicable(g, f);
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
  for (Index x = 0; x < g.vertex_count(); ++x) {
    Scalar acc(0);
    for (Index y : g.neighbors(x)) acc += f(x) - f(y);
    out(x) = acc;
  }
  return out;
}

/// Real symmetric sparse matrix holding only its upper triangle, no explicit zeros.
class SparseSymmetricMatrix {
 public:
  explicit SparseSymmetricMatrix(Eigen::SparseMatrix<double> upper);

  Index dimension() const noexcept { return upper_.rows(); }
  const Eigen::SparseMatrix<double>& upper() const noexcept { return upper_; }
  double operator()(Index row, Index col) const;
  Eigen::SparseMatrix<double> full() const;

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> operator*(const Eigen::MatrixBase<Derived>& x) const {
    using Scalar = typename Derived::Scalar;
    const Eigen::SparseMatrix<Scalar> m = upper_.cast<Scalar>();
    return m.template selfadjointView<Eigen::Upper>() * x;
  }

 private:
  Eigen::SparseMatrix<double> upper_;
};

/// Matrix of the chosen operator on the truncation. Rows of boundary vertices
/// only see the truncated neighbourhood.
SparseSymmetricMatrix truncated_matrix(const Graph& g, OperatorKind kind);

/// One "row col value" line per stored entry (0-based, row <= col), row-major order.
void write_coordinate(std::ostream& os, const SparseSymmetricMatrix& m);

}  // namespace defidx
