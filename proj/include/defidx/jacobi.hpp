#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "defidx/errors.hpp"

namespace defidx {

using Complex = std::complex<double>;

// Analytic facts about the off-diagonal sequence that the criteria may rely on
// instead of finite scans.

/// lower_coeff * n^p <= a_n <= upper_coeff * (n+1)^p for every n >= from.
struct PowerLawBounds {
  double exponent;
  double lower_coeff;
  double upper_coeff;
  Index from = 1;
};

/// a_n >= coeff * ratio^n for every n >= from, ratio > 1.
struct GeometricGrowth {
  double ratio;
  double coeff;
  Index from = 0;
};

/// Closed form of the tail sum_{n > N} 1/a_n.
struct TelescopingTail {
  std::string formula;
  std::function<double(Index)> tail_after;
};

/// Off-diagonal of an antitree-type matrix: a_n = sqrt(s_n s_{n+1}) with
/// s_n = floor(n^alpha) (floored) or s_n = n^alpha (exact), a_0 = 1 in both.
struct AntitreeProfile {
  double alpha;
  bool floored;
};

/// Semi-infinite (or finite) Jacobi matrix: off-diagonal a_n > 0, real diagonal b_n.
///
/// Entries are given by pure rules so that any index can be evaluated; a finite
/// matrix carries an extent and refuses indices past it.
class JacobiMatrix {
 public:
  using Sequence = std::function<double(Index)>;

  JacobiMatrix(std::string name, Sequence a, Sequence b);

  /// Finite matrix of dimension a.size() + 1; b must have a.size() + 1 entries.
  static JacobiMatrix finite(std::vector<double> a, std::vector<double> b);
  /// a_n = coeff * (n+1)^p, b_n = 0.
  static JacobiMatrix power_law(double exponent, double coeff = 1.0);
  /// a_n = sqrt(n^alpha (n+1)^alpha) for n >= 1, a_0 = 1, b_n = 0.
  static JacobiMatrix exact_power(double alpha);
  /// a_n = 1, b_n = 0.
  static JacobiMatrix free();

  const std::string& name() const noexcept { return name_; }
  double a(Index n) const;
  double b(Index n) const;
  /// log a_n; uses the registered log rule when a_n itself would overflow.
  double log_a(Index n) const;

  /// Dimension of a finite matrix (nullopt when semi-infinite).
  std::optional<Index> dimension() const noexcept { return dimension_; }
  bool is_finite() const noexcept { return dimension_.has_value(); }

  const std::optional<PowerLawBounds>& power_law_bounds() const noexcept { return power_law_; }
  const std::optional<GeometricGrowth>& geometric_growth() const noexcept { return geometric_; }
  const std::optional<TelescopingTail>& telescoping_tail() const noexcept { return telescoping_; }
  const std::optional<AntitreeProfile>& profile() const noexcept { return profile_; }
  /// Certified sup |b_n| over all n, if known.
  const std::optional<double>& diagonal_bound() const noexcept { return diagonal_bound_; }

  JacobiMatrix& with_power_law_bounds(PowerLawBounds rule);
  JacobiMatrix& with_geometric_growth(GeometricGrowth rule);
  JacobiMatrix& with_telescoping_tail(TelescopingTail rule);
  JacobiMatrix& with_profile(AntitreeProfile profile);
  JacobiMatrix& with_diagonal_bound(double bound);
  JacobiMatrix& with_log_a(Sequence log_a);

  /// b_n + extra(n); the diagonal bound is kept certified when `extra_bound` is given.
  JacobiMatrix add_diagonal(Sequence extra, std::optional<double> extra_bound, std::string label) const;
  /// a_k + delta at a single index. Drops every analytic rule (they no longer apply).
  JacobiMatrix perturb_off_diagonal(Index k, double delta) const;

 private:
  void check_index(Index n, bool off_diagonal) const;

  std::string name_;
  Sequence a_;
  Sequence b_;
  Sequence log_a_;
  std::optional<Index> dimension_;
  std::optional<PowerLawBounds> power_law_;
  std::optional<GeometricGrowth> geometric_;
  std::optional<TelescopingTail> telescoping_;
  std::optional<AntitreeProfile> profile_;
  std::optional<double> diagonal_bound_;
};

enum class Verdict { holds, fails, inconclusive };
const char* to_string(Verdict v);

/// Outcome of an analytic criterion with the numbers that justify it.
struct CriterionResult {
  std::string criterion;
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  std::vector<std::pair<std::string, double>> witness;

  std::optional<double> find(const std::string& key) const;
};

/// Witness keys holding indices or counts rather than real values.
bool is_count_witness(const std::string& key);

/// Σ 1/a_n = ∞ forces essential self-adjointness. "holds" when a registered
/// rule proves divergence or the partial sum exceeds `divergence_threshold`;
/// "fails" only from a registered convergence rule.
CriterionResult carleman_test(const JacobiMatrix& j, Index n_max = 1'000'000, double divergence_threshold = 1e3);

/// Log-concavity a_{n-1} a_{n+1} <= a_n^2 from some n_0 on, with bounded
/// diagonal, when Σ 1/a_n < ∞: deficiency index 1. Throws ContractError unless
/// carleman_test fails on the same matrix.
CriterionResult berezanskii_test(const JacobiMatrix& j, Index n_max = 10'000);

/// Samples of a solution of a_n u(n+1) + b_n u(n) + a_{n-1} u(n-1) = z u(n),
/// stored as u_true(n) = values(n) * exp(log_scale(n)).
struct RecurrenceSolution {
  Complex z;
  Eigen::VectorXcd values;
  Eigen::VectorXd log_scale;
  /// log Σ_{k<=n} |u_true(k)|^2 (natural log; -inf while the sum is zero)
  Eigen::VectorXd log_partial_sums;

  Index size() const noexcept { return values.size(); }
  /// log |u_true(n)|, -inf for exact zeros.
  double log_abs(Index n) const;
  /// u_true(n); may overflow to infinity for very large solutions.
  Complex value(Index n) const;
};

RecurrenceSolution solve_recurrence(const JacobiMatrix& j, Complex z, std::pair<Complex, Complex> init, Index n_max);

/// Largest relative residual over interior rows 1..n_max-1.
double max_relative_residual(const JacobiMatrix& j, const RecurrenceSolution& u);

struct WronskianValue {
  Complex mantissa;
  double log_scale = 0.0;
  Complex value() const { return mantissa * std::exp(log_scale); }
};

/// a_n (u(n+1) v(n) - u(n) v(n+1)).
WronskianValue wronskian(const JacobiMatrix& j, const RecurrenceSolution& u, const RecurrenceSolution& v, Index n);

/// Size of J1 - J2 over a scan, with a certified tail bound when both
/// matrices carry compatible analytic rules. In Kato-Rellich form
/// ||T f|| <= relative_a ||S f|| + relative_b ||f||, a bounded T gives
/// relative_a = 0 and relative_b = 2 sup|Δa| + sup|Δb|.
struct PerturbationBound {
  double sup_estimate = 0.0;
  double sup_a = 0.0;
  double sup_b = 0.0;
  Index scanned_up_to = 0;
  double rounding_allowance = 0.0;
  double relative_a = 0.0;
  double relative_b = 0.0;
  bool certified = false;
  std::optional<double> tail_bound_a;
  std::optional<double> tail_bound_b;
  /// value of the floor/exact gap expression at the end of the scan (→ 1)
  std::optional<double> asymptotic_gap;
  std::string reason;
};

PerturbationBound bounded_difference(const JacobiMatrix& j1, const JacobiMatrix& j2, Index n_max = 10'000);

/// Certified sup_{n > N} |sqrt(n^α (n+1)^α) - sqrt(⌊n^α⌋ ⌊(n+1)^α⌋)|.
double floor_gap_tail_bound(double alpha, Index after);
/// ((n+1)^α + n^α - 1) / (sqrt(n^α (n+1)^α) + sqrt((n^α - 1)((n+1)^α - 1))).
double floor_gap_expression(double alpha, Index n);

enum class LimitType { limit_point, limit_circle, inconclusive };
const char* to_string(LimitType t);

struct ClassifierTolerances {
  Index n_max = Index{1} << 20;
  /// limit circle if the last-decade mass is below this fraction of the total
  double tail_fraction = 1e-6;
  /// limit point if S(n_max) exceeds this multiple of S(n_max / 2)
  double divergence_factor = 1e6;
  /// limit circle if every window exponent is <= -1 - exponent_margin
  double exponent_margin = 0.05;
  /// limit point if every window exponent is >= this floor ...
  double point_exponent_floor = -0.5;
  /// ... and the exponents are not falling faster than this per octave
  double trend_tolerance = 5e-4;
  int windows = 6;
};

/// Diagnostics for one forward solution.
struct SolutionTrace {
  std::string init;
  double log10_total = 0.0;
  double log10_half = 0.0;
  double log10_decade = 0.0;
  /// log10 Σ_{k<2^(m+1)} |u|^2 at the end of each complete octave window
  std::vector<double> log10_window_sums;
  /// growth exponent of |u|^2 between consecutive octave windows
  std::vector<double> window_exponents;
  double exponent_trend = 0.0;
  LimitType verdict = LimitType::inconclusive;
  std::string rule;
};

struct LimitClassification {
  LimitType type = LimitType::inconclusive;
  std::string rule;
  Complex z;
  Index n_max = 0;
  std::vector<SolutionTrace> solutions;
};

/// Limit point / limit circle from forward solutions at z (canonically i).
LimitClassification classify_limit(const JacobiMatrix& j, const ClassifierTolerances& tol = {},
                                   Complex z = Complex(0.0, 1.0));

}  // namespace defidx
