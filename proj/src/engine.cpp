#include "defidx/engine.hpp"

#include <future>

#include "defidx/radial.hpp"

namespace defidx {

namespace {

constexpr const char* kRefBounded = "bounded symmetric operators are self-adjoint";
constexpr const char* kRefCarleman = "Carleman criterion: sum 1/a_n = infinity implies essential self-adjointness";
constexpr const char* kRefBerezanskii =
    "Berezanskii criterion: sum 1/a_n < infinity, log-concave a_n, bounded b_n imply deficiency index 1";
constexpr const char* kRefKatoRellich = "Kato-Rellich stability of deficiency indices under bounded perturbations";
constexpr const char* kRefDirectSum = "deficiency indices add over direct sums";
constexpr const char* kRefRadial = "antitree adjacency = 0 on non-radial functions plus a Jacobi matrix on radial ones";
constexpr const char* kRefTree = "tree alternative: eta of a locally finite tree lies in {0, infinity}";
constexpr const char* kRefClassifier = "limit point / limit circle alternative for Jacobi matrices at z = i";
constexpr const char* kRefJacobiIndex = "deficiency index of a Jacobi matrix is 0 (limit point) or 1 (limit circle)";
constexpr const char* kRefGluing = "gluing n copies by n-1 edges is a bounded perturbation of their direct sum";

Params witness_params(const CriterionResult& r) {
  Params p;
  for (const auto& [k, v] : r.witness) {
    if (is_count_witness(k))
      p.emplace_back(k, static_cast<std::int64_t>(v));
    else
      p.emplace_back(k, v);
  }
  return p;
}

DeficiencyReport finite_report(const std::string& what, Params params) {
  DeficiencyReport r;
  r.eta = Eta::finite(0);
  r.trace.push_back({"finite_operator", kRefBounded, "eta=0", Evidence::exact, std::move(params)});
  r.trace.back().params.emplace_back("object", what);
  return r;
}

// Carleman, then (via a certified bounded perturbation when a comparison matrix is
// supplied) Berezanskii, then the numerical classifier as an independent check.
DeficiencyReport jacobi_pipeline(const JacobiMatrix& j, const std::optional<JacobiMatrix>& comparison,
                                 const AnalysisOptions& opt) {
  if (j.is_finite()) {
    return finite_report("finite Jacobi matrix", {{"dimension", static_cast<std::int64_t>(*j.dimension())}});
  }
  DeficiencyReport r;
  std::optional<std::uint64_t> analytic;

  const auto carleman = carleman_test(j, opt.carleman_n_max, opt.divergence_threshold);
  r.diagnostics.criteria.emplace_back("carleman", carleman);
  r.trace.push_back({"carleman", kRefCarleman, to_string(carleman.verdict), Evidence::exact, witness_params(carleman)});
  r.trace.back().params.emplace_back("reason", carleman.reason);

  if (carleman.verdict == Verdict::holds) {
    analytic = 0;
  } else if (carleman.verdict == Verdict::fails) {
    const JacobiMatrix* candidate = &j;
    if (comparison) {
      const auto bound = bounded_difference(j, *comparison, opt.difference_n_max);
      r.diagnostics.perturbations.emplace_back("comparison", bound);
      Params p{{"compared_with", comparison->name()},
               {"scanned_sup", bound.sup_estimate},
               {"scanned_up_to", static_cast<std::int64_t>(bound.scanned_up_to)},
               {"certified", bound.certified},
               {"relative_a", bound.relative_a},
               {"relative_b", bound.relative_b}};
      if (bound.tail_bound_a) p.emplace_back("tail_bound_a", *bound.tail_bound_a);
      if (bound.asymptotic_gap) p.emplace_back("asymptotic_gap", *bound.asymptotic_gap);
      r.trace.push_back({"kato_rellich_invariance", kRefKatoRellich,
                         bound.certified ? "eta(J) = eta(comparison)" : "not certified", Evidence::exact, std::move(p)});
      if (bound.certified) candidate = &*comparison;
    }
    const auto berezanskii = berezanskii_test(*candidate, opt.berezanskii_n_max);
    r.diagnostics.criteria.emplace_back("berezanskii", berezanskii);
    r.trace.push_back(
        {"berezanskii", kRefBerezanskii, to_string(berezanskii.verdict), Evidence::exact, witness_params(berezanskii)});
    r.trace.back().params.emplace_back("matrix", candidate->name());
    r.trace.back().params.emplace_back("reason", berezanskii.reason);
    if (berezanskii.verdict == Verdict::holds) analytic = 1;
  }

  std::optional<std::uint64_t> numeric;
  if (opt.run_classifier) {
    const auto cl = classify_limit(j, opt.classifier);
    r.diagnostics.classifications.emplace_back("classifier", cl);
    if (cl.type == LimitType::limit_point) numeric = 0;
    if (cl.type == LimitType::limit_circle) numeric = 1;
    r.trace.push_back({"limit_classifier", kRefClassifier, to_string(cl.type), Evidence::numerical,
                       {{"rule", cl.rule}, {"n_max", static_cast<std::int64_t>(cl.n_max)}}});
  }

  if (analytic && numeric && *analytic != *numeric) {
    throw InconsistencyError("analytic criteria give eta=" + std::to_string(*analytic) +
                             " but the numerical classifier gives eta=" + std::to_string(*numeric) + " for " + j.name());
  }
  std::string decided_by = "none";
  if (analytic) {
    r.eta = Eta::finite(*analytic);
    decided_by = *analytic == 0 ? "carleman" : "berezanskii";
  } else if (numeric) {
    r.eta = Eta::finite(*numeric);
    decided_by = "limit_classifier";
  }
  r.trace.push_back({"conclusion", kRefJacobiIndex, "eta=" + r.eta.to_string(),
                     analytic ? Evidence::exact : (numeric ? Evidence::numerical : Evidence::structural),
                     {{"decided_by", decided_by}}});
  return r;
}

}  // namespace

std::uint64_t Eta::value() const {
  if (kind_ != Kind::finite) throw ContractError("eta is not a finite number");
  return value_;
}

std::string Eta::to_string() const {
  switch (kind_) {
    case Kind::finite: return std::to_string(value_);
    case Kind::infinite: return "infinity";
    case Kind::undetermined: return "undetermined";
  }
  return "?";
}

Eta operator+(const Eta& x, const Eta& y) {
  if (!x.decisive() || !y.decisive()) return Eta::undetermined();
  if (x.kind() == Eta::Kind::infinite || y.kind() == Eta::Kind::infinite) return Eta::infinity();
  return Eta::finite(x.value_ + y.value_);
}

Eta operator*(std::uint64_t n, const Eta& x) {
  if (!x.decisive()) return Eta::undetermined();
  if (n == 0) return Eta::finite(0);
  if (x.kind() == Eta::Kind::infinite) return Eta::infinity();
  return Eta::finite(n * x.value_);
}

const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::exact: return "exact";
    case Evidence::numerical: return "numerical";
    case Evidence::restriction: return "restriction";
    case Evidence::lower_bound: return "lower_bound";
    case Evidence::structural: return "structural";
  }
  return "?";
}

OperatorDescriptor OperatorDescriptor::finite_graph(Graph g) { return {FiniteGraphOperator{std::move(g)}}; }
OperatorDescriptor OperatorDescriptor::antitree(AntitreeSpec spec) { return {AntitreeOperator{std::move(spec)}}; }
OperatorDescriptor OperatorDescriptor::glued(OperatorDescriptor base, Index copies) {
  if (copies < 1) throw DomainError("number of copies must be positive");
  if (!base.connected()) throw ContractError("glued base must describe a connected graph");
  return {GluedOperator{std::make_shared<const OperatorDescriptor>(std::move(base)), copies}};
}
OperatorDescriptor OperatorDescriptor::disjoint_union(std::vector<OperatorDescriptor> parts) {
  if (parts.empty()) throw DomainError("disjoint union needs at least one component");
  return {DisjointUnionOperator{std::move(parts)}};
}
OperatorDescriptor OperatorDescriptor::tree(Graph g) {
  if (const auto check = is_tree(g); !check) throw DomainError("tree descriptor: " + check.diagnostic);
  return {TreeOperator{std::move(g)}};
}
OperatorDescriptor OperatorDescriptor::jacobi(JacobiMatrix j) { return {JacobiOperator{std::move(j)}}; }

std::string OperatorDescriptor::kind_name() const {
  static const char* names[] = {"finite_graph", "antitree", "glued", "disjoint_union", "tree", "jacobi"};
  return names[kind.index()];
}

bool OperatorDescriptor::connected() const {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, FiniteGraphOperator>) {
          return is_connected(k.graph);
        } else if constexpr (std::is_same_v<K, DisjointUnionOperator>) {
          return k.parts.size() == 1 && k.parts.front().connected();
        } else {
          return true;
        }
      },
      kind);
}

void Diagnostics::append(const Diagnostics& other, const std::string& prefix) {
  for (const auto& [k, v] : other.criteria) criteria.emplace_back(prefix + k, v);
  for (const auto& [k, v] : other.classifications) classifications.emplace_back(prefix + k, v);
  for (const auto& [k, v] : other.perturbations) perturbations.emplace_back(prefix + k, v);
}

DeficiencyReport direct_sum_index(const std::vector<DeficiencyReport>& reports) {
  DeficiencyReport out;
  Eta total = Eta::finite(0);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& part = reports[i];
    total = total + part.eta;
    const std::string prefix = "component[" + std::to_string(i) + "]/";
    for (auto entry : part.trace) {
      entry.rule = prefix + entry.rule;
      out.trace.push_back(std::move(entry));
    }
    out.diagnostics.append(part.diagnostics, prefix);
  }
  Params p{{"components", static_cast<std::int64_t>(reports.size())}};
  std::string values;
  for (const auto& part : reports) values += (values.empty() ? "" : ",") + part.eta.to_string();
  p.emplace_back("component_eta", values);
  out.trace.push_back({"direct_sum", kRefDirectSum, "eta=" + total.to_string(), Evidence::exact, std::move(p)});
  out.eta = total;
  return out;
}

DeficiencyReport analyze(const OperatorDescriptor& d, const AnalysisOptions& opt) {
  return std::visit(
      [&](const auto& k) -> DeficiencyReport {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, FiniteGraphOperator>) {
          if (!k.graph.boundary().empty()) {
            DeficiencyReport r;
            r.trace.push_back({"truncated_graph", kRefBounded, "undetermined", Evidence::structural,
                               {{"boundary_vertices", static_cast<std::int64_t>(k.graph.boundary().size())},
                                {"reason", std::string("graph is a truncation; its continuation is unknown")}}});
            return r;
          }
          return finite_report("finite graph", {{"vertices", static_cast<std::int64_t>(k.graph.vertex_count())},
                                                {"edges", static_cast<std::int64_t>(k.graph.edge_count())}});
        } else if constexpr (std::is_same_v<K, AntitreeOperator>) {
          const JacobiMatrix j = reduce_to_jacobi(k.spec);
          std::optional<JacobiMatrix> comparison;
          if (k.spec.is_power_law()) comparison = JacobiMatrix::exact_power(k.spec.alpha());
          DeficiencyReport r;
          Params p{{"jacobi", j.name()}, {"zero_block_eta", std::int64_t{0}}};
          if (k.spec.is_power_law()) p.emplace_back("alpha", k.spec.alpha());
          r.trace.push_back({"radial_reduction", kRefRadial, "eta(A) = eta(J)", Evidence::exact, std::move(p)});
          auto inner = jacobi_pipeline(j, comparison, opt);
          r.eta = inner.eta;
          for (auto& e : inner.trace) r.trace.push_back(std::move(e));
          r.diagnostics = std::move(inner.diagnostics);
          return r;
        } else if constexpr (std::is_same_v<K, GluedOperator>) {
          const auto base = analyze(*k.base, opt);
          auto r = direct_sum_index(std::vector<DeficiencyReport>(static_cast<std::size_t>(k.copies), base));
          r.trace.push_back({"glue_copies", kRefGluing, "eta unchanged: " + r.eta.to_string(), Evidence::exact,
                             {{"copies", static_cast<std::int64_t>(k.copies)},
                              {"added_edges", static_cast<std::int64_t>(k.copies - 1)},
                              {"perturbation_norm_bound", 2.0},
                              {"relative_a", 0.0},
                              {"relative_b", 2.0}}});
          return r;
        } else if constexpr (std::is_same_v<K, DisjointUnionOperator>) {
          std::vector<DeficiencyReport> parts;
          if (opt.parallel && k.parts.size() > 1) {
            std::vector<std::future<DeficiencyReport>> futures;
            for (const auto& part : k.parts) {
              futures.push_back(std::async(std::launch::async, [&part, &opt] { return analyze(part, opt); }));
            }
            for (auto& f : futures) parts.push_back(f.get());
          } else {
            for (const auto& part : k.parts) parts.push_back(analyze(part, opt));
          }
          return direct_sum_index(parts);
        } else if constexpr (std::is_same_v<K, TreeOperator>) {
          if (k.graph.boundary().empty()) {
            auto r = finite_report("finite tree", {{"vertices", static_cast<std::int64_t>(k.graph.vertex_count())}});
            r.trace.insert(r.trace.begin(), {"tree_alternative", kRefTree, "eta in {0, infinity}", Evidence::restriction,
                                             {{"boundary_vertices", std::int64_t{0}}}});
            return r;
          }
          DeficiencyReport r;
          r.restricted_to = {Eta::finite(0), Eta::infinity()};
          r.trace.push_back({"tree_alternative", kRefTree, "eta in {0, infinity}", Evidence::restriction,
                             {{"boundary_vertices", static_cast<std::int64_t>(k.graph.boundary().size())}}});
          return r;
        } else {
          return jacobi_pipeline(k.matrix, std::nullopt, opt);
        }
      },
      d.kind);
}

}  // namespace defidx
