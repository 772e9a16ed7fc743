#include <numeric>
#include <random>

#include <doctest.h>

#include "defidx/graph.hpp"

using namespace defidx;

namespace {

Graph path_graph(Index n) {
  GraphBuilder b(n);
  for (Index v = 0; v + 1 < n; ++v) b.add_edge(v, v + 1);
  return std::move(b).build();
}

Graph cycle_graph(Index n) {
  GraphBuilder b(n);
  for (Index v = 0; v < n; ++v) b.add_edge(v, (v + 1) % n);
  return std::move(b).build();
}

void check_simple(const Graph& g) {
  for (Index v = 0; v < g.vertex_count(); ++v) {
    CHECK_FALSE(g.adjacent(v, v));
    for (Index w : g.neighbors(v)) CHECK(g.adjacent(w, v));
  }
}

void check_antitree_laws(const AntitreeSpec& spec) {
  const Graph g = build_antitree(spec);
  const auto s = spec.sizes();
  const Index depth = spec.depth();
  CHECK(g.vertex_count() == static_cast<Index>(std::accumulate(s.begin(), s.end(), std::uint64_t{0})));
  std::uint64_t edges = 0;
  for (Index n = 0; n < depth; ++n) edges += s[n] * s[n + 1];
  CHECK(g.edge_count() == static_cast<Index>(edges));
  check_simple(g);
  CHECK(g.boundary().size() == s[depth]);

  const auto d = bfs_spheres(g, 0);
  CHECK(d.unreachable.empty());
  for (Index n = 0; n < depth; ++n) CHECK(d.sizes()[n] == static_cast<Index>(s[n]));

  CHECK(degree(g, 0) == static_cast<Index>(s[1]));
  for (Index v = 0; v < g.vertex_count(); ++v) {
    if (g.is_boundary(v)) continue;
    const Index n = g.labels()[v].sphere;
    CHECK(d.radius[v] == n);
    if (n >= 1) CHECK(degree(g, v) == static_cast<Index>(s[n - 1] + s[n + 1]));
  }
}

}  // namespace

TEST_CASE("antitree with explicit sizes (1,2,3)") {
  const Graph g = build_antitree(AntitreeSpec::explicit_sizes({1, 2, 3}));
  CHECK(g.vertex_count() == 6);
  CHECK(g.edge_count() == 8);
  CHECK(g.boundary() == std::vector<Index>{3, 4, 5});
  CHECK(degree(g, 1) == 1 + 3);
  CHECK(g.labels()[4] == VertexLabel{0, 2, 1});
}

TEST_CASE("power-law antitree alpha=2 depth 3") {
  const AntitreeSpec spec = AntitreeSpec::power_law(2.0, 3);
  CHECK(spec.sizes() == std::vector<std::uint64_t>{1, 1, 4, 9});
  const Graph g = build_antitree(spec);
  CHECK(g.vertex_count() == 15);
  CHECK(g.edge_count() == 41);
  CHECK(degree(g, 0) == 1);
  CHECK(degree(g, 1) == 1 + 4);
  check_antitree_laws(spec);
}

TEST_CASE("antitree spec validation") {
  CHECK_THROWS_AS(AntitreeSpec::power_law(0.0, 3), DomainError);
  CHECK_THROWS_AS(AntitreeSpec::power_law(2.0, 0), DomainError);
  CHECK_THROWS_AS(AntitreeSpec::explicit_sizes({2, 3}), DomainError);
  CHECK_THROWS_AS(AntitreeSpec::explicit_sizes({1, 0, 3}), DomainError);
  CHECK_THROWS_AS(AntitreeSpec::explicit_sizes({1}), DomainError);
  CHECK_THROWS_AS(AntitreeSpec::explicit_sizes({1, 2, 3}, 3), DomainError);
  CHECK(AntitreeSpec::explicit_sizes({1, 2, 3}, 1).sizes() == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("bfs on a path and on a disconnected graph") {
  const auto d = bfs_spheres(path_graph(3), 0);
  REQUIRE(d.spheres.size() == 3);
  CHECK(d.spheres[0] == std::vector<Index>{0});
  CHECK(d.spheres[1] == std::vector<Index>{1});
  CHECK(d.spheres[2] == std::vector<Index>{2});

  GraphBuilder b(5);
  b.add_edge(0, 1);
  b.add_edge(1, 2);
  b.add_edge(3, 4);
  const Graph g = std::move(b).build();
  const auto e = bfs_spheres(g, 1);
  CHECK(e.sizes() == std::vector<Index>{1, 2});
  CHECK(e.unreachable == std::vector<Index>{3, 4});
  CHECK(e.radius[3] == -1);

  CHECK(bfs_spheres(build_antitree(AntitreeSpec::explicit_sizes({1, 2, 3}, 2)), 0).sizes() ==
        std::vector<Index>{1, 2, 3});
  CHECK_THROWS_AS(bfs_spheres(g, 5), DomainError);
  CHECK_THROWS_AS(bfs_spheres(g, -1), DomainError);
}

TEST_CASE("gluing copies") {
  const Graph single = GraphBuilder(1).build();
  const Graph p = glue_copies(single, 3, 0);
  CHECK(p.vertex_count() == 3);
  CHECK(p.edge_count() == 2);
  CHECK(is_tree(p));

  const Graph base = build_antitree(AntitreeSpec::explicit_sizes({1, 2, 3}));
  const Graph one = glue_copies(base, 1, 0);
  CHECK(one.edges() == base.edges());
  CHECK(one.boundary() == base.boundary());

  const Graph two = glue_copies(base, 2, 0);
  CHECK(two.edge_count() == 2 * base.edge_count() + 1);
  CHECK(two.adjacent(0, base.vertex_count()));
  CHECK(two.labels()[base.vertex_count() + 4] == VertexLabel{1, 2, 1});
  CHECK(is_connected(two));

  CHECK_THROWS_AS(glue_copies(base, 0, 0), DomainError);
  CHECK_THROWS_AS(glue_copies(base, 2, 6), DomainError);
}

TEST_CASE("glue_copies counts for every vertex and copy number") {
  const Graph base = build_antitree(AntitreeSpec::power_law(1.5, 4));
  for (Index n = 1; n <= 5; ++n) {
    for (Index v0 : {Index{0}, Index{3}, base.vertex_count() - 1}) {
      const Graph g = glue_copies(base, n, v0);
      CHECK(g.vertex_count() == n * base.vertex_count());
      CHECK(g.edge_count() == n * base.edge_count() + (n - 1));
      CHECK(g.boundary().size() == static_cast<std::size_t>(n) * base.boundary().size());
      CHECK(is_connected(g));
      check_simple(g);
    }
  }
}

TEST_CASE("disjoint union") {
  const std::vector<Graph> parts{path_graph(2), cycle_graph(3)};
  const Graph u = disjoint_union(parts);
  CHECK(u.vertex_count() == 5);
  CHECK(u.edge_count() == 4);
  CHECK_FALSE(is_connected(u));
  CHECK(u.labels()[3].copy == 1);
}

TEST_CASE("tree recognition") {
  CHECK(is_tree(path_graph(4)));
  CHECK_FALSE(is_tree(cycle_graph(3)));
  CHECK_FALSE(is_tree(build_antitree(AntitreeSpec::explicit_sizes({1, 2, 3}))));
  GraphBuilder b(4);
  b.add_edge(0, 1);
  b.add_edge(2, 3);
  const auto forest = is_tree(std::move(b).build());
  CHECK_FALSE(forest);
  CHECK_FALSE(forest.diagnostic.empty());
  CHECK(is_tree(GraphBuilder(1).build()));
}

TEST_CASE("degree") {
  GraphBuilder b(2);
  const Graph g = std::move(b).build();
  CHECK(degree(g, 0) == 0);
  CHECK_THROWS_AS(degree(g, 2), DomainError);
  const AntitreeSpec spec = AntitreeSpec::power_law(2.0, 5);
  const Graph t = build_antitree(spec);
  CHECK(degree(t, 0) == 1);
  CHECK(degree(t, 2) == 1 + 9);  // a vertex of S_2
}

TEST_CASE("builder rejects malformed input") {
  {
    GraphBuilder b(2);
    b.add_edge(0, 0);
    CHECK_THROWS_AS(std::move(b).build(), DomainError);
  }
  {
    GraphBuilder b(2);
    b.add_edge(0, 1);
    b.add_edge(1, 0);
    CHECK_THROWS_AS(std::move(b).build(), DomainError);
  }
  {
    GraphBuilder b(2);
    b.add_edge(0, 2);
    CHECK_THROWS_AS(std::move(b).build(), DomainError);
  }
  {
    GraphBuilder b(2);
    b.mark_boundary(3);
    CHECK_THROWS_AS(std::move(b).build(), DomainError);
  }
}

TEST_CASE("edges are sorted with u < v") {
  const Graph g = glue_copies(build_antitree(AntitreeSpec::power_law(2.0, 3)), 3, 2);
  const auto e = g.edges();
  CHECK(std::is_sorted(e.begin(), e.end()));
  for (const auto& [u, v] : e) CHECK(u < v);
  CHECK(static_cast<Index>(e.size()) == g.edge_count());
}

TEST_CASE("random explicit antitrees satisfy the structural laws") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> size(1, 10);
  std::uniform_int_distribution<int> depth(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = depth(rng);
    std::vector<std::uint64_t> s{1};
    for (Index n = 1; n <= d; ++n) s.push_back(static_cast<std::uint64_t>(size(rng)));
    CAPTURE(trial);
    const AntitreeSpec spec = AntitreeSpec::explicit_sizes(s);
    check_antitree_laws(spec);

    const Graph g = build_antitree(spec);
    const Index copies = 1 + trial % 4;
    const Graph glued = glue_copies(g, copies, trial % g.vertex_count());
    CHECK(glued.vertex_count() == copies * g.vertex_count());
    CHECK(glued.edge_count() == copies * g.edge_count() + copies - 1);
    check_simple(glued);
  }
}
