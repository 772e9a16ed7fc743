#include "defidx/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace defidx {

namespace {
void require_vertex(const Graph& g, Index v) {
  if (!g.contains(v)) {
    throw DomainError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(g.vertex_count()) + ")");
  }
}
}  // namespace

std::span<const Index> Graph::neighbors(Index v) const {
  require_vertex(*this, v);
  const auto begin = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)]);
  const auto end = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v) + 1]);
  return {targets_.data() + begin, end - begin};
}

bool Graph::adjacent(Index v, Index w) const {
  const auto nb = neighbors(v);
  return std::binary_search(nb.begin(), nb.end(), w);
}

bool Graph::is_boundary(Index v) const {
  require_vertex(*this, v);
  return boundary_mask_[static_cast<std::size_t>(v)];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (Index v = 0; v < vertex_count(); ++v) {
    for (Index w : neighbors(v)) {
      if (v < w) out.emplace_back(v, w);
    }
  }
  return out;
}

GraphBuilder::GraphBuilder(Index vertex_count) : vertex_count_(vertex_count) {
  if (vertex_count < 0) throw DomainError("vertex count must be non-negative");
  labels_.resize(static_cast<std::size_t>(vertex_count));
}

Index GraphBuilder::add_vertex() {
  labels_.emplace_back();
  return vertex_count_++;
}

Index GraphBuilder::add_vertex(const VertexLabel& label) {
  labels_.emplace_back(label);
  return vertex_count_++;
}

void GraphBuilder::add_edge(Index u, Index v) { edges_.emplace_back(std::min(u, v), std::max(u, v)); }

void GraphBuilder::mark_boundary(Index v) { boundary_.push_back(v); }

void GraphBuilder::set_label(Index v, const VertexLabel& label) {
  if (v < 0 || v >= vertex_count_) throw DomainError("label for vertex out of range");
  labels_[static_cast<std::size_t>(v)] = label;
}

Graph GraphBuilder::build() && {
  const auto n = static_cast<std::size_t>(vertex_count_);
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto [u, v] = edges_[i];
    if (u < 0 || v >= vertex_count_) {
      throw DomainError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") references a missing vertex");
    }
    if (u == v) throw DomainError("self-loop at vertex " + std::to_string(u));
    if (i > 0 && edges_[i - 1] == edges_[i]) {
      throw DomainError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
  }

  Graph g;
  std::vector<Index> deg(n, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  g.offsets_.assign(n + 1, 0);
  std::partial_sum(deg.begin(), deg.end(), g.offsets_.begin() + 1);
  g.targets_.resize(2 * edges_.size());
  std::vector<Index> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges_) {
    g.targets_[static_cast<std::size_t>(fill[static_cast<std::size_t>(u)]++)] = v;
    g.targets_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(g.targets_.begin() + g.offsets_[v], g.targets_.begin() + g.offsets_[v + 1]);
  }

  g.boundary_mask_.assign(n, false);
  for (Index b : boundary_) {
    if (b < 0 || b >= vertex_count_) throw DomainError("boundary vertex out of range");
    g.boundary_mask_[static_cast<std::size_t>(b)] = true;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (g.boundary_mask_[v]) g.boundary_.push_back(static_cast<Index>(v));
  }

  if (std::any_of(labels_.begin(), labels_.end(), [](const auto& l) { return l.has_value(); })) {
    g.labels_.reserve(n);
    for (const auto& l : labels_) g.labels_.push_back(l.value_or(VertexLabel{}));
  }
  return g;
}

AntitreeSpec::AntitreeSpec(std::variant<PowerLawSizes, ExplicitSizes> kind, Index depth)
    : kind_(std::move(kind)), depth_(depth) {
  if (depth < 1) throw DomainError("antitree depth must be a positive integer");
  if (const auto* p = std::get_if<PowerLawSizes>(&kind_)) {
    power_.emplace(p->alpha);
  } else {
    const auto& sizes = std::get<ExplicitSizes>(kind_).sizes;
    if (sizes.empty() || sizes.front() != 1) throw DomainError("explicit sphere sizes must start with s_0 = 1");
    if (std::any_of(sizes.begin(), sizes.end(), [](std::uint64_t s) { return s < 1; })) {
      throw DomainError("explicit sphere sizes must all be >= 1");
    }
    if (static_cast<std::size_t>(depth) >= sizes.size()) {
      throw DomainError("depth exceeds the number of explicit sphere sizes");
    }
  }
}

AntitreeSpec AntitreeSpec::power_law(double alpha, Index depth) { return {PowerLawSizes{alpha}, depth}; }

AntitreeSpec AntitreeSpec::explicit_sizes(std::vector<std::uint64_t> sizes) {
  const auto depth = static_cast<Index>(sizes.size()) - 1;
  return {ExplicitSizes{std::move(sizes)}, depth};
}

AntitreeSpec AntitreeSpec::explicit_sizes(std::vector<std::uint64_t> sizes, Index depth) {
  return {ExplicitSizes{std::move(sizes)}, depth};
}

double AntitreeSpec::alpha() const {
  if (!power_) throw ContractError("explicit antitree spec has no exponent");
  return power_->exponent();
}

std::optional<Index> AntitreeSpec::extent() const {
  if (power_) return std::nullopt;
  return static_cast<Index>(std::get<ExplicitSizes>(kind_).sizes.size()) - 1;
}

std::uint64_t AntitreeSpec::size(Index n) const {
  if (n < 0) throw DomainError("sphere index must be non-negative");
  if (n == 0) return 1;
  if (power_) return (*power_)(static_cast<std::uint64_t>(n));
  const auto& sizes = std::get<ExplicitSizes>(kind_).sizes;
  if (static_cast<std::size_t>(n) >= sizes.size()) {
    throw DomainError("sphere " + std::to_string(n) + " lies beyond the explicit size sequence");
  }
  return sizes[static_cast<std::size_t>(n)];
}

long double AntitreeSpec::size_real(Index n) const {
  if (power_ && n > 0) return power_->approx(static_cast<std::uint64_t>(n));
  return static_cast<long double>(size(n));
}

std::vector<std::uint64_t> AntitreeSpec::sizes() const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(depth_) + 1);
  for (Index n = 0; n <= depth_; ++n) out[static_cast<std::size_t>(n)] = size(n);
  return out;
}

AntitreeSpec AntitreeSpec::with_depth(Index depth) const { return {kind_, depth}; }

std::vector<Index> SphereDecomposition::sizes() const {
  std::vector<Index> out;
  out.reserve(spheres.size());
  for (const auto& s : spheres) out.push_back(static_cast<Index>(s.size()));
  return out;
}

Graph build_antitree(const AntitreeSpec& spec) {
  const auto sizes = spec.sizes();
  GraphBuilder builder;
  std::vector<Index> first(sizes.size() + 1, 0);
  for (std::size_t n = 0; n < sizes.size(); ++n) {
    first[n] = builder.add_vertex(VertexLabel{0, static_cast<Index>(n), 0});
    for (std::uint64_t i = 1; i < sizes[n]; ++i) {
      builder.add_vertex(VertexLabel{0, static_cast<Index>(n), static_cast<Index>(i)});
    }
  }
  for (std::size_t n = 0; n + 1 < sizes.size(); ++n) {
    for (std::uint64_t i = 0; i < sizes[n]; ++i) {
      for (std::uint64_t j = 0; j < sizes[n + 1]; ++j) {
        builder.add_edge(first[n] + static_cast<Index>(i), first[n + 1] + static_cast<Index>(j));
      }
    }
  }
  for (std::uint64_t i = 0; i < sizes.back(); ++i) builder.mark_boundary(first[sizes.size() - 1] + static_cast<Index>(i));
  return std::move(builder).build();
}

SphereDecomposition bfs_spheres(const Graph& g, Index root) {
  require_vertex(g, root);
  SphereDecomposition d;
  d.root = root;
  d.radius.assign(static_cast<std::size_t>(g.vertex_count()), -1);
  d.radius[static_cast<std::size_t>(root)] = 0;
  std::deque<Index> queue{root};
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    const Index r = d.radius[static_cast<std::size_t>(v)];
    if (static_cast<std::size_t>(r) >= d.spheres.size()) d.spheres.emplace_back();
    d.spheres[static_cast<std::size_t>(r)].push_back(v);
    for (Index w : g.neighbors(v)) {
      if (d.radius[static_cast<std::size_t>(w)] < 0) {
        d.radius[static_cast<std::size_t>(w)] = r + 1;
        queue.push_back(w);
      }
    }
  }
  for (auto& s : d.spheres) std::sort(s.begin(), s.end());
  for (Index v = 0; v < g.vertex_count(); ++v) {
    if (d.radius[static_cast<std::size_t>(v)] < 0) d.unreachable.push_back(v);
  }
  return d;
}

Graph glue_copies(const Graph& g, Index copies, Index v0) {
  if (copies < 1) throw DomainError("number of copies must be positive");
  require_vertex(g, v0);
  const Index n = g.vertex_count();
  GraphBuilder builder(n * copies);
  const auto edges = g.edges();
  for (Index c = 0; c < copies; ++c) {
    const Index offset = c * n;
    for (Index v = 0; v < n; ++v) {
      VertexLabel label = g.has_labels() ? g.labels()[static_cast<std::size_t>(v)] : VertexLabel{};
      label.copy = c;
      builder.set_label(offset + v, label);
    }
    for (const auto& [u, v] : edges) builder.add_edge(offset + u, offset + v);
    for (Index b : g.boundary()) builder.mark_boundary(offset + b);
    if (c + 1 < copies) builder.add_edge(offset + v0, offset + n + v0);
  }
  return std::move(builder).build();
}

Graph disjoint_union(std::span<const Graph> parts) {
  Index total = 0;
  for (const auto& p : parts) total += p.vertex_count();
  GraphBuilder builder(total);
  Index offset = 0;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const auto& p = parts[c];
    for (Index v = 0; v < p.vertex_count(); ++v) {
      VertexLabel label = p.has_labels() ? p.labels()[static_cast<std::size_t>(v)] : VertexLabel{};
      label.copy = static_cast<Index>(c);
      builder.set_label(offset + v, label);
    }
    for (const auto& [u, v] : p.edges()) builder.add_edge(offset + u, offset + v);
    for (Index b : p.boundary()) builder.mark_boundary(offset + b);
    offset += p.vertex_count();
  }
  return std::move(builder).build();
}

Index degree(const Graph& g, Index v) { return static_cast<Index>(g.neighbors(v).size()); }

bool is_connected(const Graph& g) {
  if (g.vertex_count() == 0) return true;
  return bfs_spheres(g, 0).unreachable.empty();
}

TreeCheck is_tree(const Graph& g) {
  if (g.vertex_count() == 0) return {false, "empty graph"};
  const auto d = bfs_spheres(g, 0);
  if (!d.unreachable.empty()) {
    return {false, "graph is disconnected: " + std::to_string(d.unreachable.size()) + " vertices unreachable from 0"};
  }
  if (g.edge_count() != g.vertex_count() - 1) {
    return {false, "connected with " + std::to_string(g.edge_count()) + " edges on " +
                       std::to_string(g.vertex_count()) + " vertices; some edge lies on a cycle"};
  }
  return {true, {}};
}

}  // namespace defidx
