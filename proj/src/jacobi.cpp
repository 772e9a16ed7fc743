#include "defidx/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recurrence_stepper.hpp"

namespace defidx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double zero_sequence(Index) { return 0.0; }

void add_witness(CriterionResult& r, std::string key, double value) { r.witness.emplace_back(std::move(key), value); }

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

JacobiMatrix::JacobiMatrix(std::string name, Sequence a, Sequence b)
    : name_(std::move(name)), a_(std::move(a)), b_(b ? std::move(b) : Sequence(zero_sequence)) {
  if (!a_) throw DomainError("Jacobi matrix needs an off-diagonal rule");
}

JacobiMatrix JacobiMatrix::finite(std::vector<double> a, std::vector<double> b) {
  if (b.size() != a.size() + 1) throw DomainError("finite Jacobi matrix needs b.size() == a.size() + 1");
  if (std::any_of(a.begin(), a.end(), [](double x) { return !(x > 0); })) {
    throw InvariantViolation("Jacobi off-diagonal entries must be positive");
  }
  const auto dim = static_cast<Index>(b.size());
  JacobiMatrix j(
      "finite", [a = std::move(a)](Index n) { return a[static_cast<std::size_t>(n)]; },
      [b = std::move(b)](Index n) { return b[static_cast<std::size_t>(n)]; });
  j.dimension_ = dim;
  return j;
}

JacobiMatrix JacobiMatrix::power_law(double exponent, double coeff) {
  if (!(coeff > 0)) throw DomainError("power-law coefficient must be positive");
  JacobiMatrix j("power_law(p=" + std::to_string(exponent) + ")",
                 [exponent, coeff](Index n) { return coeff * std::pow(static_cast<double>(n + 1), exponent); }, nullptr);
  // n^p <= (n+1)^p for p >= 0; for p < 0 only the upper bound direction flips, skip the rule.
  if (exponent >= 0) j.with_power_law_bounds({exponent, coeff, coeff, 1});
  j.with_diagonal_bound(0.0);
  return j;
}

JacobiMatrix JacobiMatrix::exact_power(double alpha) {
  if (!(alpha > 0)) throw DomainError("exponent must be positive");
  const double half = alpha / 2;
  JacobiMatrix j(
      "exact_power(alpha=" + std::to_string(alpha) + ")",
      [half](Index n) {
        if (n == 0) return 1.0;
        const auto x = static_cast<double>(n);
        return std::pow(x, half) * std::pow(x + 1, half);
      },
      nullptr);
  j.with_power_law_bounds({alpha, 1.0, 1.0, 1}).with_profile({alpha, false}).with_diagonal_bound(0.0);
  if (alpha == 2.0) {
    j.with_telescoping_tail({"sum_{n>N} 1/(n(n+1)) = 1/(N+1)", [](Index N) { return 1.0 / static_cast<double>(N + 1); }});
  }
  return j;
}

JacobiMatrix JacobiMatrix::free() {
  JacobiMatrix j("free", [](Index) { return 1.0; }, nullptr);
  j.with_power_law_bounds({0.0, 1.0, 1.0, 0}).with_diagonal_bound(0.0);
  return j;
}

void JacobiMatrix::check_index(Index n, bool off_diagonal) const {
  if (n < 0) throw DomainError("Jacobi index must be non-negative");
  if (dimension_) {
    const Index limit = off_diagonal ? *dimension_ - 1 : *dimension_;
    if (n >= limit) {
      throw DomainError("index " + std::to_string(n) + " beyond finite Jacobi matrix of dimension " +
                        std::to_string(*dimension_));
    }
  }
}

double JacobiMatrix::a(Index n) const {
  check_index(n, true);
  return a_(n);
}

double JacobiMatrix::b(Index n) const {
  check_index(n, false);
  return b_(n);
}

double JacobiMatrix::log_a(Index n) const {
  check_index(n, true);
  if (log_a_) return log_a_(n);
  return std::log(a_(n));
}

JacobiMatrix& JacobiMatrix::with_power_law_bounds(PowerLawBounds rule) {
  power_law_ = rule;
  return *this;
}
JacobiMatrix& JacobiMatrix::with_geometric_growth(GeometricGrowth rule) {
  if (!(rule.ratio > 1) || !(rule.coeff > 0)) throw DomainError("geometric growth needs ratio > 1 and coeff > 0");
  geometric_ = rule;
  return *this;
}
JacobiMatrix& JacobiMatrix::with_telescoping_tail(TelescopingTail rule) {
  telescoping_ = std::move(rule);
  return *this;
}
JacobiMatrix& JacobiMatrix::with_profile(AntitreeProfile profile) {
  profile_ = profile;
  return *this;
}
JacobiMatrix& JacobiMatrix::with_diagonal_bound(double bound) {
  diagonal_bound_ = bound;
  return *this;
}
JacobiMatrix& JacobiMatrix::with_log_a(Sequence log_a) {
  log_a_ = std::move(log_a);
  return *this;
}

JacobiMatrix JacobiMatrix::add_diagonal(Sequence extra, std::optional<double> extra_bound, std::string label) const {
  JacobiMatrix out = *this;
  out.name_ = name_ + " + " + label;
  out.b_ = [base = b_, extra = std::move(extra)](Index n) { return base(n) + extra(n); };
  if (diagonal_bound_ && extra_bound) {
    out.diagonal_bound_ = *diagonal_bound_ + *extra_bound;
  } else {
    out.diagonal_bound_.reset();
  }
  return out;
}

JacobiMatrix JacobiMatrix::perturb_off_diagonal(Index k, double delta) const {
  check_index(k, true);
  JacobiMatrix out(name_ + " (a_" + std::to_string(k) + " perturbed)",
                   [base = a_, k, delta](Index n) { return n == k ? base(n) + delta : base(n); }, b_);
  out.dimension_ = dimension_;
  out.diagonal_bound_ = diagonal_bound_;
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

bool is_count_witness(const std::string& key) {
  return key == "n_max" || key == "n0" || key == "tail_run" || key == "violations" || key == "first_violation";
}

std::optional<double> CriterionResult::find(const std::string& key) const {
  for (const auto& [k, v] : witness) {
    if (k == key) return v;
  }
  return std::nullopt;
}

CriterionResult carleman_test(const JacobiMatrix& j, Index n_max, double divergence_threshold) {
  if (n_max < 10) throw ContractError("carleman_test needs n_max >= 10");
  if (!(divergence_threshold > 0)) throw DomainError("divergence threshold must be positive");
  CriterionResult r;
  r.criterion = "carleman";

  Index last = n_max;
  if (j.dimension()) last = std::min(last, *j.dimension() - 2);

  const auto& power = j.power_law_bounds();
  CompensatedSum total;
  CompensatedSum ruled;  // part of the sum covered by the power-law rule
  for (Index n = 0; n <= last; ++n) {
    const double an = j.a(n);
    if (!(an > 0)) throw InvariantViolation("a_" + std::to_string(n) + " is not positive");
    total.add(1.0 / an);
    if (power && n >= power->from && n >= 1) {
      const auto x = static_cast<double>(n);
      const double lo = power->lower_coeff * std::pow(x, power->exponent);
      const double hi = power->upper_coeff * std::pow(x + 1, power->exponent);
      if (an < lo * (1 - 1e-12) || an > hi * (1 + 1e-12)) {
        throw InconsistencyError("registered power-law bounds violated at n=" + std::to_string(n) + " for " + j.name());
      }
      ruled.add(1.0 / an);
    }
  }
  const double partial = total.value();
  add_witness(r, "n_max", static_cast<double>(last));
  add_witness(r, "partial_sum", partial);

  if (const auto& tele = j.telescoping_tail()) {
    const double tail = tele->tail_after(last);
    add_witness(r, "tail_exact", tail);
    add_witness(r, "limit_estimate", partial + tail);
  }

  if (j.is_finite()) {
    r.verdict = Verdict::inconclusive;
    r.reason = "finite matrix: the series has finitely many terms";
    return r;
  }

  if (power) {
    const double p = power->exponent;
    add_witness(r, "rule_exponent", p);
    if (p <= 1) {
      r.verdict = Verdict::holds;
      r.reason = "a_n <= c (n+1)^p with p <= 1, so sum 1/a_n dominates a divergent p-series";
      return r;
    }
    // sum_{n >= m} n^-p <= m^-p + m^(1-p)/(p-1)
    const auto from = static_cast<double>(std::max<Index>(power->from, 1));
    const double bound_from = (std::pow(from, -p) + std::pow(from, 1 - p) / (p - 1)) / power->lower_coeff;
    if (ruled.value() > bound_from * (1 + 1e-12)) {
      throw InconsistencyError("partial sum exceeds the certified power-law bound for " + j.name());
    }
    const double n_end = std::max<double>(static_cast<double>(last), from);
    const double tail = std::pow(n_end, 1 - p) / ((p - 1) * power->lower_coeff);
    add_witness(r, "tail_upper_bound", tail);
    add_witness(r, "total_upper_bound", partial + tail);
    r.verdict = Verdict::fails;
    r.reason = "a_n >= c n^p with p > 1, so sum 1/a_n converges by comparison";
    return r;
  }

  if (const auto& geo = j.geometric_growth()) {
    for (Index n = std::max<Index>(geo->from, 0); n <= last; ++n) {
      if (j.log_a(n) < std::log(geo->coeff) + static_cast<double>(n) * std::log(geo->ratio) - 1e-9) {
        throw InconsistencyError("registered geometric growth violated at n=" + std::to_string(n) + " for " + j.name());
      }
    }
    const double tail = std::pow(geo->ratio, -static_cast<double>(last + 1)) / (geo->coeff * (1 - 1 / geo->ratio));
    add_witness(r, "tail_upper_bound", tail);
    add_witness(r, "total_upper_bound", partial + tail);
    r.verdict = Verdict::fails;
    r.reason = "a_n >= c r^n with r > 1, so sum 1/a_n converges geometrically";
    return r;
  }

  if (j.telescoping_tail()) {
    r.verdict = Verdict::fails;
    r.reason = "closed-form tail is finite";
    return r;
  }

  if (partial > divergence_threshold) {
    r.verdict = Verdict::holds;
    r.reason = "partial sum exceeds the divergence threshold";
    add_witness(r, "divergence_threshold", divergence_threshold);
    return r;
  }
  r.verdict = Verdict::inconclusive;
  r.reason = "no analytic rule and partial sum below the divergence threshold";
  add_witness(r, "divergence_threshold", divergence_threshold);
  return r;
}

CriterionResult berezanskii_test(const JacobiMatrix& j, Index n_max) {
  if (n_max < 10) throw ContractError("berezanskii_test needs n_max >= 10");
  const auto carleman = carleman_test(j, std::max<Index>(n_max, 10));
  if (carleman.verdict != Verdict::fails) {
    throw ContractError("berezanskii_test requires sum 1/a_n < infinity to be established (carleman: " +
                        std::string(to_string(carleman.verdict)) + ")");
  }
  CriterionResult r;
  r.criterion = "berezanskii";

  Index first_violation = -1;
  Index last_violation = -1;
  Index violations = 0;
  double sup_b_first_half = 0.0;
  double sup_b_second_half = 0.0;
  double prev = j.log_a(0);
  double cur = j.log_a(1);
  for (Index n = 0; n <= n_max; ++n) {
    double& slot = n <= n_max / 2 ? sup_b_first_half : sup_b_second_half;
    slot = std::max(slot, std::fabs(j.b(n)));
  }
  for (Index n = 1; n < n_max; ++n) {
    const double next = j.log_a(n + 1);
    const double excess = prev + next - 2 * cur;
    const double scale = std::fabs(prev) + std::fabs(next) + 2 * std::fabs(cur) + 1;
    if (excess > 1e-13 * scale) {
      if (first_violation < 0) first_violation = n;
      last_violation = n;
      ++violations;
    }
    prev = cur;
    cur = next;
  }
  const double sup_b = std::max(sup_b_first_half, sup_b_second_half);
  const Index n0 = last_violation + 1 < 1 ? 1 : last_violation + 1;
  const Index tail_run = n_max - n0;

  add_witness(r, "n_max", static_cast<double>(n_max));
  add_witness(r, "violations", static_cast<double>(violations));
  if (first_violation >= 0) add_witness(r, "first_violation", static_cast<double>(first_violation));
  add_witness(r, "n0", static_cast<double>(n0));
  add_witness(r, "tail_run", static_cast<double>(tail_run));
  add_witness(r, "sup_abs_b", sup_b);
  if (j.diagonal_bound()) add_witness(r, "certified_b_bound", *j.diagonal_bound());

  if (!j.diagonal_bound() && sup_b_second_half > 1.25 * sup_b_first_half) {
    r.verdict = Verdict::inconclusive;
    r.reason = "diagonal appears unbounded over the scan; the criterion does not apply";
    return r;
  }
  if (last_violation > n_max / 2) {
    r.verdict = Verdict::fails;
    r.reason = "log-concavity violations persist into the second half of the scan";
    return r;
  }
  if (tail_run < 100) {
    r.verdict = Verdict::inconclusive;
    r.reason = "fewer than 100 consecutive log-concave indices at the end of the scan";
    return r;
  }
  r.verdict = Verdict::holds;
  r.reason = "a_{n-1} a_{n+1} <= a_n^2 for all scanned n >= n0, bounded diagonal, convergent sum 1/a_n";
  return r;
}

double RecurrenceSolution::log_abs(Index n) const {
  const double m = std::abs(values(n));
  if (m == 0) return -kInf;
  return std::log(m) + log_scale(n);
}

Complex RecurrenceSolution::value(Index n) const { return values(n) * std::exp(log_scale(n)); }

RecurrenceSolution solve_recurrence(const JacobiMatrix& j, Complex z, std::pair<Complex, Complex> init, Index n_max) {
  if (n_max < 1) throw DomainError("solve_recurrence needs n_max >= 1");
  if (init.first == Complex(0) && init.second == Complex(0)) throw DomainError("initial values must not both vanish");
  if (j.dimension() && n_max > *j.dimension() - 1) throw DomainError("n_max exceeds the finite matrix");

  RecurrenceSolution sol;
  sol.z = z;
  sol.values.resize(n_max + 1);
  sol.log_scale.resize(n_max + 1);
  sol.log_partial_sums.resize(n_max + 1);

  detail::RecurrenceStepper stepper(z, init.first, init.second);
  // index 0 is recorded before the first rescale could touch it
  {
    const double m = std::max(std::abs(init.first), std::abs(init.second));
    const double shift = (m > 1e150 || (m < 1e-150 && m > 0)) ? std::log(m) : 0.0;
    sol.values(0) = init.first * std::exp(-shift);
    sol.log_scale(0) = shift;
    sol.log_partial_sums(0) = std::abs(init.first) == 0 ? -kInf : 2 * std::log(std::abs(init.first));
  }
  sol.values(1) = stepper.current();
  sol.log_scale(1) = stepper.log_scale();
  sol.log_partial_sums(1) = stepper.log_partial_sum();

  double a_prev = j.a(0);
  if (!(a_prev > 0)) throw InvariantViolation("a_0 is not positive");
  for (Index n = 1; n < n_max; ++n) {
    const double an = j.a(n);
    if (!(an > 0)) throw InvariantViolation("a_" + std::to_string(n) + " is not positive");
    stepper.step(a_prev, j.b(n), an);
    sol.values(n + 1) = stepper.current();
    sol.log_scale(n + 1) = stepper.log_scale();
    sol.log_partial_sums(n + 1) = stepper.log_partial_sum();
    a_prev = an;
  }
  return sol;
}

double max_relative_residual(const JacobiMatrix& j, const RecurrenceSolution& u) {
  double worst = 0.0;
  for (Index n = 1; n + 1 < u.size(); ++n) {
    const double ref = u.log_scale(n);
    const Complex up = u.values(n + 1) * std::exp(u.log_scale(n + 1) - ref);
    const Complex um = u.values(n - 1) * std::exp(u.log_scale(n - 1) - ref);
    const Complex t_up = j.a(n) * up;
    const Complex t_mid = (j.b(n) - u.z) * u.values(n);
    const Complex t_dn = j.a(n - 1) * um;
    const double denom = std::abs(t_up) + std::abs(u.z * u.values(n)) + std::abs(j.b(n) * u.values(n)) + std::abs(t_dn);
    if (denom == 0) continue;
    worst = std::max(worst, std::abs(t_up + t_mid + t_dn) / denom);
  }
  return worst;
}

WronskianValue wronskian(const JacobiMatrix& j, const RecurrenceSolution& u, const RecurrenceSolution& v, Index n) {
  if (u.z != v.z) throw ContractError("wronskian of solutions at different spectral parameters");
  if (n < 0 || n + 1 >= u.size() || n + 1 >= v.size()) throw DomainError("wronskian index out of range");
  const double s1 = u.log_scale(n + 1) + v.log_scale(n);
  const double s2 = u.log_scale(n) + v.log_scale(n + 1);
  const double ref = std::max(s1, s2);
  const Complex t1 = u.values(n + 1) * v.values(n) * std::exp(s1 - ref);
  const Complex t2 = u.values(n) * v.values(n + 1) * std::exp(s2 - ref);
  return {j.a(n) * (t1 - t2), ref};
}

double floor_gap_expression(double alpha, Index n) {
  const auto x = std::pow(static_cast<double>(n), alpha);
  const auto y = std::pow(static_cast<double>(n + 1), alpha);
  return (y + x - 1) / (std::sqrt(x * y) + std::sqrt((x - 1) * (y - 1)));
}

double floor_gap_tail_bound(double alpha, Index after) {
  const auto m = static_cast<double>(std::max<Index>(after, 0) + 1);
  return (std::pow(1 + 1 / m, alpha) + 1) / (2 - std::pow(m, -alpha));
}

PerturbationBound bounded_difference(const JacobiMatrix& j1, const JacobiMatrix& j2, Index n_max) {
  if (n_max < 1) throw DomainError("bounded_difference needs n_max >= 1");
  PerturbationBound out;
  Index last = n_max;
  if (j1.dimension()) last = std::min(last, *j1.dimension() - 2);
  if (j2.dimension()) last = std::min(last, *j2.dimension() - 2);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (Index n = 0; n <= last; ++n) {
    const double a1 = j1.a(n), a2 = j2.a(n);
    const double b1 = j1.b(n), b2 = j2.b(n);
    out.sup_a = std::max(out.sup_a, std::fabs(a1 - a2));
    out.sup_b = std::max(out.sup_b, std::fabs(b1 - b2));
    out.rounding_allowance =
        std::max(out.rounding_allowance, 4 * eps * std::max(a1, a2) + 2 * eps * std::max(std::fabs(b1), std::fabs(b2)));
  }
  out.scanned_up_to = last;
  out.sup_estimate = std::max(out.sup_a, out.sup_b);

  const auto& p1 = j1.profile();
  const auto& p2 = j2.profile();
  if (p1 && p2 && p1->alpha == p2->alpha) {
    if (p1->floored == p2->floored) {
      out.tail_bound_a = 0.0;
    } else {
      out.tail_bound_a = floor_gap_tail_bound(p1->alpha, last);
      out.asymptotic_gap = floor_gap_expression(p1->alpha, std::max<Index>(last, 1));
    }
  }
  if (j1.diagonal_bound() && j2.diagonal_bound()) {
    out.tail_bound_b = *j1.diagonal_bound() + *j2.diagonal_bound();
  }
  out.certified = !j1.is_finite() && !j2.is_finite() && out.tail_bound_a && out.tail_bound_b;
  if (j1.is_finite() && j2.is_finite()) out.certified = true;

  const double da = out.certified && out.tail_bound_a ? std::max(out.sup_a, *out.tail_bound_a) : out.sup_a;
  const double db = out.certified && out.tail_bound_b ? std::max(out.sup_b, *out.tail_bound_b) : out.sup_b;
  out.relative_a = 0.0;
  out.relative_b = 2 * da + db;
  out.reason = out.certified ? "difference is a bounded tridiagonal operator with certified tail"
                             : "finite scan only; no analytic rule bounds the tail";
  return out;
}

}  // namespace defidx
