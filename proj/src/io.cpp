#include "defidx/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace defidx {

namespace {

constexpr double kLn10 = 2.302585092994045684;

void write_string(std::ostream& os, const std::string& s) {
  // reuse nlohmann's escaping for strings
  os << Json(s).dump();
}

void write_json(std::ostream& os, const Json& j, int indent, int level) {
  const std::string pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
  const std::string close_pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * level), ' ') : "";
  const char* nl = indent >= 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        write_string(os, it.key());
        os << (indent >= 0 ? ": " : ":");
        write_json(os, it.value(), indent, level + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat || indent < 0) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << (indent >= 0 ? ", " : ",");
          write_json(os, j[i], indent, level + 1);
        }
        os << ']';
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',' << nl;
        os << pad;
        write_json(os, j[i], indent, level + 1);
      }
      os << nl << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        os << "null";
      } else {
        os << format_double(x);
      }
      return;
    }
    default:
      os << j.dump();
  }
}

Json params_to_json(const Params& params) {
  Json out = Json::object();
  for (const auto& [k, v] : params) {
    std::visit([&out, &key = k](const auto& x) { out[key] = x; }, v);
  }
  return out;
}

Json eta_to_json(const Eta& e) {
  if (e.kind() == Eta::Kind::finite) return e.value();
  return e.to_string();
}

template <typename T>
T require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

JacobiMatrix jacobi_from_json(const Json& j) {
  std::optional<JacobiMatrix> m;
  if (j.contains("a")) {
    auto a = require<std::vector<double>>(j, "a");
    auto b = j.contains("b") ? require<std::vector<double>>(j, "b") : std::vector<double>(a.size() + 1, 0.0);
    m = JacobiMatrix::finite(std::move(a), std::move(b));
  } else if (j.contains("exact_power")) {
    m = JacobiMatrix::exact_power(require<double>(j, "exact_power"));
  } else if (j.contains("power")) {
    const double coeff = j.contains("coeff") ? require<double>(j, "coeff") : 1.0;
    m = JacobiMatrix::power_law(require<double>(j, "power"), coeff);
  } else if (j.contains("antitree_alpha")) {
    m = reduce_to_jacobi(AntitreeSpec::power_law(require<double>(j, "antitree_alpha"), 1));
  } else if (j.value("free", false)) {
    m = JacobiMatrix::free();
  } else {
    throw ParseError("jacobi descriptor needs one of: a, exact_power, power, antitree_alpha, free");
  }
  if (j.contains("diagonal_constant")) {
    const double c = require<double>(j, "diagonal_constant");
    *m = m->add_diagonal([c](Index) { return c; }, std::fabs(c), "const(" + format_double(c) + ")");
  }
  return *m;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep floats recognisable as floats in JSON
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  write_json(os, j, indent, 0);
  return os.str();
}

Json graph_to_json(const Graph& g) {
  Json j;
  j["vertex_count"] = g.vertex_count();
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back(Json::array({u, v}));
  j["edges"] = std::move(edges);
  j["boundary"] = g.boundary();
  Json labels = Json::object();
  if (g.has_labels()) {
    for (Index v = 0; v < g.vertex_count(); ++v) {
      const auto& l = g.labels()[static_cast<std::size_t>(v)];
      labels[std::to_string(v)] = Json::array({l.copy, l.sphere, l.within});
    }
  }
  j["labels"] = std::move(labels);
  return j;
}

Graph graph_from_json(const Json& j) {
  const auto n = require<Index>(j, "vertex_count");
  if (n < 0) throw ParseError("vertex_count must be non-negative");
  GraphBuilder builder(n);
  try {
    for (const auto& e : require<Json>(j, "edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("edges must be [u, v] pairs");
      builder.add_edge(e[0].get<Index>(), e[1].get<Index>());
    }
    if (j.contains("boundary")) {
      for (const auto& b : j.at("boundary")) builder.mark_boundary(b.get<Index>());
    }
    if (j.contains("labels")) {
      for (auto it = j.at("labels").begin(); it != j.at("labels").end(); ++it) {
        const auto& l = it.value();
        if (!l.is_array() || l.size() != 3) throw ParseError("labels must be [copy, sphere, within] triples");
        builder.set_label(std::stoll(it.key()), VertexLabel{l[0].get<Index>(), l[1].get<Index>(), l[2].get<Index>()});
      }
    }
    return std::move(builder).build();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph document: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("graph document: label keys must be vertex ids");
  } catch (const DomainError& e) {
    throw ParseError(std::string("graph document: ") + e.what());
  }
}

Json criterion_to_json(const CriterionResult& r) {
  Json j;
  j["criterion"] = r.criterion;
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  Json w = Json::object();
  for (const auto& [k, v] : r.witness) {
    if (is_count_witness(k))
      w[k] = static_cast<std::int64_t>(v);
    else
      w[k] = v;
  }
  j["witness"] = std::move(w);
  return j;
}

Json classification_to_json(const LimitClassification& c) {
  Json j;
  j["verdict"] = to_string(c.type);
  j["rule"] = c.rule;
  j["z"] = Json::array({c.z.real(), c.z.imag()});
  j["n_max"] = c.n_max;
  Json sols = Json::array();
  for (const auto& s : c.solutions) {
    Json t;
    t["init"] = s.init;
    t["verdict"] = to_string(s.verdict);
    t["rule"] = s.rule;
    t["log10_partial_sum"] = s.log10_total;
    t["log10_partial_sum_half"] = s.log10_half;
    t["log10_partial_sum_decade"] = s.log10_decade;
    t["window_exponents"] = s.window_exponents;
    t["exponent_trend"] = s.exponent_trend;
    t["log10_window_sums"] = s.log10_window_sums;
    sols.push_back(std::move(t));
  }
  j["solutions"] = std::move(sols);
  return j;
}

Json perturbation_to_json(const PerturbationBound& b) {
  Json j;
  j["sup_estimate"] = b.sup_estimate;
  j["sup_a"] = b.sup_a;
  j["sup_b"] = b.sup_b;
  j["scanned_up_to"] = b.scanned_up_to;
  j["rounding_allowance"] = b.rounding_allowance;
  j["relative_a"] = b.relative_a;
  j["relative_b"] = b.relative_b;
  j["certified"] = b.certified;
  if (b.tail_bound_a) j["tail_bound_a"] = *b.tail_bound_a;
  if (b.tail_bound_b) j["tail_bound_b"] = *b.tail_bound_b;
  if (b.asymptotic_gap) j["asymptotic_gap"] = *b.asymptotic_gap;
  j["reason"] = b.reason;
  return j;
}

Json report_to_json(const DeficiencyReport& r) {
  Json j;
  j["eta"] = eta_to_json(r.eta);
  if (!r.restricted_to.empty()) {
    Json set = Json::array();
    for (const auto& e : r.restricted_to) set.push_back(eta_to_json(e));
    j["restricted_to"] = std::move(set);
  }
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    Json e;
    e["rule"] = t.rule;
    e["paper_ref"] = t.reference;
    e["verdict"] = t.verdict;
    e["evidence"] = to_string(t.evidence);
    e["params"] = params_to_json(t.params);
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  Json diag;
  Json crit = Json::object();
  for (const auto& [k, v] : r.diagnostics.criteria) crit[k] = criterion_to_json(v);
  Json cls = Json::object();
  for (const auto& [k, v] : r.diagnostics.classifications) cls[k] = classification_to_json(v);
  Json per = Json::object();
  for (const auto& [k, v] : r.diagnostics.perturbations) per[k] = perturbation_to_json(v);
  diag["criteria"] = std::move(crit);
  diag["classifications"] = std::move(cls);
  diag["perturbations"] = std::move(per);
  j["diagnostics"] = std::move(diag);
  return j;
}

Json reduction_report_to_json(const ReductionReport& r) {
  Json j;
  j["max_deviation"] = r.max_deviation;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  if (r.failing_identity) j["failing_identity"] = *r.failing_identity;
  j["depth"] = r.depth;
  j["tolerance"] = r.tolerance;
  Json per;
  per["projection_commutes"] = r.per_identity.projection;
  per["radial_action"] = r.per_identity.radial;
  per["jacobi_conjugation"] = r.per_identity.jacobi;
  j["per_identity"] = std::move(per);
  if (r.fault) j["fault_injection"] = Json{{"index", r.fault->index}, {"delta", r.fault->delta}};
  return j;
}

OperatorDescriptor descriptor_from_json(const Json& j) {
  const auto kind = require<std::string>(j, "kind");
  try {
    if (kind == "antitree") {
      if (j.contains("sizes")) return OperatorDescriptor::antitree(AntitreeSpec::explicit_sizes(require<std::vector<std::uint64_t>>(j, "sizes")));
      const Index depth = j.contains("depth") ? require<Index>(j, "depth") : 8;
      return OperatorDescriptor::antitree(AntitreeSpec::power_law(require<double>(j, "alpha"), depth));
    }
    if (kind == "glued") {
      return OperatorDescriptor::glued(descriptor_from_json(require<Json>(j, "base")), require<Index>(j, "copies"));
    }
    if (kind == "disjoint_union") {
      std::vector<OperatorDescriptor> parts;
      for (const auto& p : require<Json>(j, "parts")) parts.push_back(descriptor_from_json(p));
      return OperatorDescriptor::disjoint_union(std::move(parts));
    }
    if (kind == "finite_graph") return OperatorDescriptor::finite_graph(graph_from_json(require<Json>(j, "graph")));
    if (kind == "tree") return OperatorDescriptor::tree(graph_from_json(require<Json>(j, "graph")));
    if (kind == "jacobi") return OperatorDescriptor::jacobi(jacobi_from_json(j));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError("descriptor '" + kind + "': " + e.what());
  }
  throw ParseError("unknown descriptor kind '" + kind + "'");
}

void write_sphere_csv(std::ostream& os, const std::vector<std::uint64_t>& sizes) {
  os << "n,s_n\n";
  for (std::size_t n = 0; n < sizes.size(); ++n) os << n << ',' << sizes[n] << '\n';
}

void write_solution_csv(std::ostream& os, const RecurrenceSolution& sol) {
  os << "n,log10_abs_u,log10_partial_sum\n";
  for (Index n = 0; n < sol.size(); ++n) {
    const double lu = sol.log_abs(n) / kLn10;
    const double ls = sol.log_partial_sums(n) / kLn10;
    os << n << ',' << (std::isfinite(lu) ? format_double(lu) : std::string("-inf")) << ','
       << (std::isfinite(ls) ? format_double(ls) : std::string("-inf")) << '\n';
  }
}

}  // namespace defidx
