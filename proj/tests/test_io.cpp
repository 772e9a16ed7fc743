#include <sstream>

#include <doctest.h>

#include "defidx/io.hpp"

using namespace defidx;

TEST_CASE("graph JSON round trip") {
  const Graph g = glue_copies(build_antitree(AntitreeSpec::explicit_sizes({1, 2, 3})), 2, 0);
  const Json j = graph_to_json(g);
  CHECK(j["vertex_count"] == 12);
  CHECK(j["edges"].size() == 17);
  CHECK(j["edges"][0] == Json::array({0, 1}));
  CHECK(j["boundary"] == Json::array({3, 4, 5, 9, 10, 11}));
  CHECK(j["labels"]["7"] == Json::array({1, 1, 0}));

  const Graph back = graph_from_json(Json::parse(dump_json(j)));
  CHECK(back.vertex_count() == g.vertex_count());
  CHECK(back.edges() == g.edges());
  CHECK(back.boundary() == g.boundary());
  CHECK(back.labels() == g.labels());
  CHECK(dump_json(graph_to_json(back)) == dump_json(j));
}

TEST_CASE("malformed graph documents") {
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"edges": []})")), ParseError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"vertex_count": 2, "edges": [[0, 0]]})")), ParseError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"vertex_count": 2, "edges": [[0, 5]]})")), ParseError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"vertex_count": 2, "edges": [[0, 1, 2]]})")), ParseError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"vertex_count": "two", "edges": []})")), ParseError);
  CHECK_NOTHROW(graph_from_json(Json::parse(R"({"vertex_count": 2, "edges": [[1, 0]]})")));
}

TEST_CASE("floats are printed with 17 significant digits") {
  Json j;
  j["third"] = 1.0 / 3.0;
  j["two"] = 2.0;
  j["int"] = 7;
  j["tiny"] = 1.0000000000000001e-299;
  j["nan"] = std::nan("");
  j["list"] = Json::array({0.1, 1});
  CHECK(dump_json(j) ==
        "{\n  \"third\": 0.33333333333333331,\n  \"two\": 2.0,\n  \"int\": 7,\n  \"tiny\": 1.0000000000000001e-299,\n"
        "  \"nan\": null,\n  \"list\": [0.10000000000000001, 1]\n}");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(Json::parse(dump_json(j))["third"].get<double>() == 1.0 / 3.0);
}

TEST_CASE("key order is insertion order") {
  Json j;
  j["zeta"] = 1;
  j["alpha"] = 2;
  CHECK(dump_json(j, -1) == R"({"zeta":1,"alpha":2})");
}

TEST_CASE("descriptor documents") {
  const auto glued = descriptor_from_json(
      Json::parse(R"({"kind": "glued", "copies": 3, "base": {"kind": "antitree", "alpha": 2, "depth": 5}})"));
  CHECK(glued.kind_name() == "glued");
  CHECK(std::get<GluedOperator>(glued.kind).copies == 3);
  CHECK(std::get<AntitreeOperator>(std::get<GluedOperator>(glued.kind).base->kind).spec.depth() == 5);

  const auto sizes = descriptor_from_json(Json::parse(R"({"kind": "antitree", "sizes": [1, 2, 3]})"));
  CHECK(std::get<AntitreeOperator>(sizes.kind).spec.sizes() == std::vector<std::uint64_t>{1, 2, 3});

  const auto tree = descriptor_from_json(
      Json::parse(R"({"kind": "tree", "graph": {"vertex_count": 3, "edges": [[0, 1], [1, 2]], "boundary": [2]}})"));
  CHECK(tree.kind_name() == "tree");

  const auto union_ = descriptor_from_json(Json::parse(
      R"({"kind": "disjoint_union", "parts": [{"kind": "antitree", "alpha": 2}, {"kind": "jacobi", "free": true}]})"));
  CHECK(std::get<DisjointUnionOperator>(union_.kind).parts.size() == 2);

  for (const char* doc : {R"({"kind": "jacobi", "power": 2, "coeff": 0.5})", R"({"kind": "jacobi", "exact_power": 1.5})",
                          R"({"kind": "jacobi", "antitree_alpha": 2.5, "diagonal_constant": 3})",
                          R"({"kind": "jacobi", "a": [1, 2, 3], "b": [0, 0, 0, 0]})"}) {
    CAPTURE(doc);
    CHECK(descriptor_from_json(Json::parse(doc)).kind_name() == "jacobi");
  }
}

TEST_CASE("invalid descriptors are parse errors") {
  for (const char* doc : {R"({"alpha": 2})", R"({"kind": "hyperbolic"})", R"({"kind": "antitree", "alpha": 0})",
                          R"({"kind": "antitree", "alpha": "two"})", R"({"kind": "glued", "copies": 0, "base": {"kind": "antitree", "alpha": 2}})",
                          R"({"kind": "tree", "graph": {"vertex_count": 3, "edges": [[0, 1], [1, 2], [0, 2]]}})",
                          R"({"kind": "jacobi", "a": [1, -2], "b": [0, 0, 0]})", R"({"kind": "jacobi"})",
                          R"({"kind": "antitree", "sizes": [2, 3]})", R"([1, 2])"}) {
    CAPTURE(doc);
    CHECK_THROWS_AS(descriptor_from_json(Json::parse(doc)), ParseError);
  }
}

TEST_CASE("report JSON layout") {
  const auto r = analyze(OperatorDescriptor::glued(OperatorDescriptor::antitree(AntitreeSpec::power_law(3.0, 4)), 2));
  const Json j = report_to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"eta", "trace", "diagnostics"});
  CHECK(j["eta"] == 2);
  for (const auto& e : j["trace"]) {
    std::vector<std::string> entry_keys;
    for (auto it = e.begin(); it != e.end(); ++it) entry_keys.push_back(it.key());
    CHECK(entry_keys == std::vector<std::string>{"rule", "paper_ref", "verdict", "evidence", "params"});
  }
  CHECK(j["diagnostics"].contains("criteria"));

  DeficiencyReport u;
  u.restricted_to = {Eta::finite(0), Eta::infinity()};
  const Json uj = report_to_json(u);
  CHECK(uj["eta"] == "undetermined");
  CHECK(uj["restricted_to"] == Json::array({0, "infinity"}));
}

TEST_CASE("reduction report JSON") {
  ReductionReport r;
  r.max_deviation = 0.5;
  r.trials = 3;
  r.seed = 4;
  r.failing_identity = "radial_action";
  const Json j = reduction_report_to_json(r);
  CHECK(j.begin().key() == "max_deviation");
  CHECK(j["failing_identity"] == "radial_action");
  CHECK(j["seed"] == 4);
  ReductionReport ok;
  CHECK_FALSE(reduction_report_to_json(ok).contains("failing_identity"));
}

TEST_CASE("CSV writers") {
  std::ostringstream sizes;
  write_sphere_csv(sizes, sphere_sizes(2.0, 4));
  CHECK(sizes.str() == "n,s_n\n0,1\n1,1\n2,4\n3,9\n4,16\n");

  std::ostringstream trace;
  write_solution_csv(trace, solve_recurrence(JacobiMatrix::free(), 0.0, {1.0, 0.0}, 2));
  CHECK(trace.str() == "n,log10_abs_u,log10_partial_sum\n0,0.0,0.0\n1,-inf,0.0\n2,0.0,0.30102999566398114\n");
}
