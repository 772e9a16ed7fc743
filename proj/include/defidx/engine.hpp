#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "defidx/graph.hpp"
#include "defidx/jacobi.hpp"

namespace defidx {

/// Deficiency index value: a natural number, infinity, or undetermined.
class Eta {
 public:
  enum class Kind { finite, infinite, undetermined };

  static Eta finite(std::uint64_t n) { return Eta(Kind::finite, n); }
  static Eta infinity() { return Eta(Kind::infinite, 0); }
  static Eta undetermined() { return Eta(Kind::undetermined, 0); }

  Kind kind() const noexcept { return kind_; }
  bool decisive() const noexcept { return kind_ != Kind::undetermined; }
  std::uint64_t value() const;
  std::string to_string() const;

  friend Eta operator+(const Eta& x, const Eta& y);
  friend Eta operator*(std::uint64_t n, const Eta& x);
  friend bool operator==(const Eta&, const Eta&) = default;

 private:
  Eta(Kind kind, std::uint64_t value) : kind_(kind), value_(value) {}
  Kind kind_;
  std::uint64_t value_;
};

struct OperatorDescriptor;

struct FiniteGraphOperator {
  Graph graph;
};
struct AntitreeOperator {
  AntitreeSpec spec;
};
struct GluedOperator {
  std::shared_ptr<const OperatorDescriptor> base;
  Index copies;
};
struct DisjointUnionOperator {
  std::vector<OperatorDescriptor> parts;
};
struct TreeOperator {
  Graph graph;
};
struct JacobiOperator {
  JacobiMatrix matrix;
};

/// Which operator to analyse: adjacency matrices of described graphs, or a Jacobi matrix.
struct OperatorDescriptor {
  std::variant<FiniteGraphOperator, AntitreeOperator, GluedOperator, DisjointUnionOperator, TreeOperator,
               JacobiOperator>
      kind;

  static OperatorDescriptor finite_graph(Graph g);
  static OperatorDescriptor antitree(AntitreeSpec spec);
  static OperatorDescriptor glued(OperatorDescriptor base, Index copies);
  static OperatorDescriptor disjoint_union(std::vector<OperatorDescriptor> parts);
  static OperatorDescriptor tree(Graph g);
  static OperatorDescriptor jacobi(JacobiMatrix j);

  std::string kind_name() const;
  /// Whether the described graph is connected (Jacobi matrices count as paths).
  bool connected() const;
};

using ParamValue = std::variant<bool, std::int64_t, double, std::string>;
using Params = std::vector<std::pair<std::string, ParamValue>>;

/// What kind of conclusion a trace step supports.
enum class Evidence { exact, numerical, restriction, lower_bound, structural };
const char* to_string(Evidence e);

struct TraceEntry {
  std::string rule;
  std::string reference;
  std::string verdict;
  Evidence evidence = Evidence::exact;
  Params params;
};

struct Diagnostics {
  std::vector<std::pair<std::string, CriterionResult>> criteria;
  std::vector<std::pair<std::string, LimitClassification>> classifications;
  std::vector<std::pair<std::string, PerturbationBound>> perturbations;

  void append(const Diagnostics& other, const std::string& prefix);
};

struct DeficiencyReport {
  Eta eta = Eta::undetermined();
  /// set of values still possible when eta is undetermined but restricted
  std::vector<Eta> restricted_to;
  std::vector<TraceEntry> trace;
  Diagnostics diagnostics;
};

struct AnalysisOptions {
  Index carleman_n_max = 1'000'000;
  double divergence_threshold = 1e3;
  Index berezanskii_n_max = 10'000;
  Index difference_n_max = 10'000;
  ClassifierTolerances classifier;
  bool run_classifier = true;
  /// analyse disjoint-union components concurrently
  bool parallel = true;
};

/// Deficiency index of the described operator with the rules that produced it.
/// Throws InconsistencyError when two decisive rules disagree.
DeficiencyReport analyze(const OperatorDescriptor& d, const AnalysisOptions& options = {});

/// η of a direct sum: component sum, infinity absorbing, undetermined if any part is.
DeficiencyReport direct_sum_index(const std::vector<DeficiencyReport>& reports);

}  // namespace defidx
