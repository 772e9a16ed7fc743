#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "defidx/engine.hpp"
#include "defidx/graph.hpp"
#include "defidx/jacobi.hpp"
#include "defidx/radial.hpp"

namespace defidx {

using Json = nlohmann::ordered_json;

/// Malformed input document.
struct ParseError : Error {
  using Error::Error;
};

/// Serialises with insertion-ordered keys and every float printed with 17
/// significant digits; non-finite floats become null.
std::string dump_json(const Json& j, int indent = 2);

/// {vertex_count, edges: [[u,v],...] (u<v, sorted), boundary: [...], labels: {"v": [copy, sphere, within]}}
Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);

Json criterion_to_json(const CriterionResult& r);
Json classification_to_json(const LimitClassification& c);
Json perturbation_to_json(const PerturbationBound& b);

/// {eta: integer | "infinity" | "undetermined", trace: [{rule, paper_ref, verdict, evidence, params}], diagnostics}
Json report_to_json(const DeficiencyReport& r);

/// {max_deviation, trials, seed, failing_identity?} plus per-identity detail.
Json reduction_report_to_json(const ReductionReport& r);

/// Descriptor documents, e.g. {"kind": "glued", "copies": 3, "base": {"kind": "antitree", "alpha": 2}}.
OperatorDescriptor descriptor_from_json(const Json& j);

/// "n,s_n" header then one row per sphere.
void write_sphere_csv(std::ostream& os, const std::vector<std::uint64_t>& sizes);

/// "n,log10_abs_u,log10_partial_sum" header then one row per sample.
void write_solution_csv(std::ostream& os, const RecurrenceSolution& sol);

/// %.17g
std::string format_double(double x);

}  // namespace defidx
