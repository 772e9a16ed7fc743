#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "defidx/errors.hpp"
#include "defidx/power_floor.hpp"

namespace defidx {

/// Where a vertex came from: copy index (gluing), sphere radius and position
/// inside the sphere (antitree construction). -1 marks "not applicable".
struct VertexLabel {
  Index copy = 0;
  Index sphere = -1;
  Index within = -1;

  friend bool operator==(const VertexLabel&, const VertexLabel&) = default;
};

using Edge = std::pair<Index, Index>;

/// Finite truncation of a locally finite simple graph.
///
/// Adjacency is stored as sorted neighbour lists (CSR). Boundary vertices are
/// those whose neighbour list may be incomplete because the infinite graph was
/// cut off there. Immutable once built.
class Graph {
 public:
  Graph() = default;

  Index vertex_count() const noexcept { return static_cast<Index>(offsets_.empty() ? 0 : offsets_.size() - 1); }
  Index edge_count() const noexcept { return static_cast<Index>(targets_.size() / 2); }

  std::span<const Index> neighbors(Index v) const;
  bool adjacent(Index v, Index w) const;

  const std::vector<Index>& boundary() const noexcept { return boundary_; }
  bool is_boundary(Index v) const;

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<VertexLabel>& labels() const noexcept { return labels_; }

  /// Edges as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edges() const;

  bool contains(Index v) const noexcept { return v >= 0 && v < vertex_count(); }

 private:
  friend class GraphBuilder;
  std::vector<Index> offsets_;
  std::vector<Index> targets_;
  std::vector<Index> boundary_;
  std::vector<bool> boundary_mask_;
  std::vector<VertexLabel> labels_;
};

/// Accumulates vertices and undirected edges; build() validates and freezes.
class GraphBuilder {
 public:
  explicit GraphBuilder(Index vertex_count = 0);

  Index add_vertex();
  Index add_vertex(const VertexLabel& label);
  void add_edge(Index u, Index v);
  void mark_boundary(Index v);
  void set_label(Index v, const VertexLabel& label);

  /// Throws DomainError on self-loops, duplicate edges or out-of-range ids.
  Graph build() &&;

 private:
  Index vertex_count_;
  std::vector<Edge> edges_;
  std::vector<Index> boundary_;
  std::vector<std::optional<VertexLabel>> labels_;
};

struct PowerLawSizes {
  double alpha;
};

struct ExplicitSizes {
  std::vector<std::uint64_t> sizes;
};

/// Rule generating the sphere sizes s_n of an antitree, plus the number of
/// spheres to materialise.
class AntitreeSpec {
 public:
  static AntitreeSpec power_law(double alpha, Index depth);
  static AntitreeSpec explicit_sizes(std::vector<std::uint64_t> sizes);
  static AntitreeSpec explicit_sizes(std::vector<std::uint64_t> sizes, Index depth);

  Index depth() const noexcept { return depth_; }
  bool is_power_law() const noexcept { return std::holds_alternative<PowerLawSizes>(kind_); }
  double alpha() const;
  const std::variant<PowerLawSizes, ExplicitSizes>& kind() const noexcept { return kind_; }

  /// Largest radius for which s_n is defined; nullopt for power laws (unbounded).
  std::optional<Index> extent() const;

  std::uint64_t size(Index n) const;
  /// s_n as a real number; see FloorPower::approx.
  long double size_real(Index n) const;
  /// (s_0, ..., s_depth).
  std::vector<std::uint64_t> sizes() const;

  AntitreeSpec with_depth(Index depth) const;

 private:
  AntitreeSpec(std::variant<PowerLawSizes, ExplicitSizes> kind, Index depth);
  std::variant<PowerLawSizes, ExplicitSizes> kind_;
  Index depth_;
  std::optional<FloorPower> power_;
};

/// BFS level structure around a root.
struct SphereDecomposition {
  Index root = 0;
  std::vector<std::vector<Index>> spheres;
  std::vector<Index> unreachable;
  /// radius of each vertex, -1 for unreachable ones
  std::vector<Index> radius;

  std::vector<Index> sizes() const;
};

/// Spheres S_0..S_depth with complete bipartite layers between consecutive
/// spheres. Vertices are numbered sphere by sphere; boundary = S_depth.
Graph build_antitree(const AntitreeSpec& spec);

SphereDecomposition bfs_spheres(const Graph& g, Index root);

/// n labelled copies of g joined by edges (i, v0) -- (i+1, v0).
Graph glue_copies(const Graph& g, Index copies, Index v0);

/// Disjoint union; copy labels record the operand index.
Graph disjoint_union(std::span<const Graph> parts);

Index degree(const Graph& g, Index v);

bool is_connected(const Graph& g);

struct TreeCheck {
  bool tree = false;
  std::string diagnostic;
  explicit operator bool() const noexcept { return tree; }
};

TreeCheck is_tree(const Graph& g);

}  // namespace defidx
