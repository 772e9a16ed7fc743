#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "defidx/jacobi.hpp"
#include "recurrence_stepper.hpp"

namespace defidx {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kLn2 = 0.693147180559945309;

double slope(const std::vector<double>& y) {
  const auto m = static_cast<double>(y.size());
  if (y.size() < 2) return 0.0;
  const double xbar = (m - 1) / 2;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - xbar;
    num += dx * (y[i] - ybar);
    den += dx * dx;
  }
  return num / den;
}

struct Run {
  std::string init;
  Complex u0, u1;
  detail::RecurrenceStepper stepper;
  double log_half = 0.0;
  double log_decade = 0.0;
  std::vector<double> log_window_end;  // log S at n = 2^(k+1) - 1

  Run(std::string label, Complex z, Complex a, Complex b) : init(std::move(label)), u0(a), u1(b), stepper(z, a, b) {}
};

void record(Run& run, Index n, Index n_max) {
  const double ls = run.stepper.log_partial_sum();
  if (n == n_max / 2) run.log_half = ls;
  if (n == n_max / 10) run.log_decade = ls;
  if (std::has_single_bit(static_cast<std::uint64_t>(n + 1))) run.log_window_end.push_back(ls);
}

SolutionTrace evaluate(const Run& run, const ClassifierTolerances& tol) {
  SolutionTrace t;
  t.init = run.init;
  const double total = run.stepper.log_partial_sum();
  t.log10_total = total / kLn10;
  t.log10_half = run.log_half / kLn10;
  t.log10_decade = run.log_decade / kLn10;
  for (double l : run.log_window_end) t.log10_window_sums.push_back(l / kLn10);

  // window k covers [2^k, 2^(k+1)); its mass is S(2^(k+1)-1) - S(2^k - 1)
  std::vector<double> log_mass;
  for (std::size_t k = 1; k < run.log_window_end.size(); ++k) {
    const double hi = run.log_window_end[k];
    const double lo = run.log_window_end[k - 1];
    log_mass.push_back(hi + std::log(-std::expm1(lo - hi)));
  }
  const auto w = static_cast<std::size_t>(tol.windows);
  if (log_mass.size() >= w + 1) {
    for (std::size_t k = log_mass.size() - w - 1; k + 1 < log_mass.size(); ++k) {
      t.window_exponents.push_back((log_mass[k + 1] - log_mass[k]) / kLn2 - 1);
    }
  }
  t.exponent_trend = slope(t.window_exponents);

  if (total - run.log_half >= std::log(tol.divergence_factor)) {
    t.verdict = LimitType::limit_point;
    t.rule = "divergence_factor";
    return t;
  }
  if (-std::expm1(run.log_decade - total) <= tol.tail_fraction) {
    t.verdict = LimitType::limit_circle;
    t.rule = "tail_fraction";
    return t;
  }
  if (!t.window_exponents.empty()) {
    const auto [lo, hi] = std::minmax_element(t.window_exponents.begin(), t.window_exponents.end());
    if (*hi <= -1 - tol.exponent_margin && t.exponent_trend <= tol.trend_tolerance) {
      t.verdict = LimitType::limit_circle;
      t.rule = "window_exponent";
      return t;
    }
    if (*lo >= tol.point_exponent_floor && t.exponent_trend >= -tol.trend_tolerance) {
      t.verdict = LimitType::limit_point;
      t.rule = "window_exponent";
      return t;
    }
  }
  t.verdict = LimitType::inconclusive;
  t.rule = "none";
  return t;
}

}  // namespace

const char* to_string(LimitType t) {
  switch (t) {
    case LimitType::limit_point: return "limit_point";
    case LimitType::limit_circle: return "limit_circle";
    case LimitType::inconclusive: return "inconclusive";
  }
  return "?";
}

LimitClassification classify_limit(const JacobiMatrix& j, const ClassifierTolerances& tol, Complex z) {
  if (tol.n_max < 1000) throw ContractError("classify_limit needs n_max >= 1000");
  if (z.imag() == 0) throw DomainError("classification point must be non-real");
  if (tol.windows < 2) throw DomainError("classifier needs at least two windows");
  if (j.is_finite()) throw ContractError("classify_limit applies to semi-infinite matrices");
  const Index n_max = tol.n_max;

  std::vector<double> a(static_cast<std::size_t>(n_max));
  std::vector<double> b(static_cast<std::size_t>(n_max));
  for (Index n = 0; n < n_max; ++n) {
    a[static_cast<std::size_t>(n)] = j.a(n);
    b[static_cast<std::size_t>(n)] = j.b(n);
    if (!(a[static_cast<std::size_t>(n)] > 0)) throw InvariantViolation("a_" + std::to_string(n) + " is not positive");
  }

  std::vector<Run> runs;
  runs.emplace_back("u(-1)=0", z, Complex(1.0), (z - b[0]) / a[0]);
  runs.emplace_back("(0,1)", z, Complex(0.0), Complex(1.0));
  for (auto& run : runs) {
    // S(0) is complete once index 0 is in; the stepper already holds indices 0 and 1
    if (std::abs(run.u0) > 0) run.log_window_end.push_back(2 * std::log(std::abs(run.u0)));
    else run.log_window_end.push_back(-std::numeric_limits<double>::infinity());
    record(run, 1, n_max);
  }
  for (Index n = 1; n < n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    for (auto& run : runs) {
      run.stepper.step(a[i - 1], b[i], a[i]);
      record(run, n + 1, n_max);
    }
  }

  LimitClassification out;
  out.z = z;
  out.n_max = n_max;
  for (const auto& run : runs) out.solutions.push_back(evaluate(run, tol));

  const auto dominant = std::max_element(out.solutions.begin(), out.solutions.end(),
                                         [](const auto& x, const auto& y) { return x.log10_total < y.log10_total; });
  const bool all_circle = std::all_of(out.solutions.begin(), out.solutions.end(),
                                      [](const auto& s) { return s.verdict == LimitType::limit_circle; });
  if (all_circle) {
    out.type = LimitType::limit_circle;
    out.rule = dominant->rule;
  } else if (dominant->verdict == LimitType::limit_point) {
    out.type = LimitType::limit_point;
    out.rule = dominant->rule;
  } else {
    out.type = LimitType::inconclusive;
    out.rule = "none";
  }
  return out;
}

}  // namespace defidx
