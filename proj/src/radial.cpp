#include "defidx/radial.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <random>

namespace defidx {

namespace {

// s_n memoised in lazily filled blocks; safe to share between threads.
class SizeCache {
 public:
  explicit SizeCache(AntitreeSpec spec) : spec_(std::move(spec)) {}

  long double operator()(Index n) {
    if (n >= kBlock * kBlocks) return spec_.size_real(n);
    const auto b = static_cast<std::size_t>(n / kBlock);
    std::call_once(filled_[b], [&] {
      blocks_[b] = std::make_unique<long double[]>(kBlock);
      for (Index k = 0; k < kBlock; ++k) blocks_[b][k] = spec_.size_real(static_cast<Index>(b) * kBlock + k);
    });
    return blocks_[b][n % kBlock];
  }

 private:
  static constexpr Index kBlock = 4096;
  static constexpr Index kBlocks = 520;

  AntitreeSpec spec_;
  std::array<std::once_flag, kBlocks> filled_;
  std::array<std::unique_ptr<long double[]>, kBlocks> blocks_;
};

}  // namespace

namespace detail {
void require_connected(const SphereDecomposition& d) {
  if (!d.unreachable.empty()) {
    throw DomainError("radial projection needs a connected truncation (" + std::to_string(d.unreachable.size()) +
                      " unreachable vertices)");
  }
}
}  // namespace detail

double RadialFunction::weighted_norm_squared() const {
  return (weights.array() * values.array().abs2()).sum();
}

RadialFunction radial_values(const SphereDecomposition& d, const FiniteFunction& f) {
  detail::require_connected(d);
  RadialFunction rf;
  const auto n = static_cast<Index>(d.spheres.size());
  rf.values.resize(n);
  rf.weights.resize(n);
  for (Index r = 0; r < n; ++r) {
    const auto& sphere = d.spheres[static_cast<std::size_t>(r)];
    Complex mean(0);
    for (Index v : sphere) mean += f(v);
    rf.values(r) = mean / static_cast<double>(sphere.size());
    rf.weights(r) = static_cast<double>(sphere.size());
  }
  return rf;
}

FiniteFunction lift_radial(const SphereDecomposition& d, const Eigen::VectorXcd& values) {
  detail::require_connected(d);
  if (values.size() != static_cast<Index>(d.spheres.size())) throw DomainError("one radial value per sphere expected");
  FiniteFunction f(static_cast<Index>(d.radius.size()));
  for (std::size_t v = 0; v < d.radius.size(); ++v) f(static_cast<Index>(v)) = values(d.radius[v]);
  return f;
}

Eigen::VectorXcd weight_transform(const RadialFunction& rf) {
  if (rf.values.size() != rf.weights.size()) throw DomainError("radial function needs one weight per value");
  return rf.weights.array().sqrt().cast<Complex>() * rf.values.array();
}

JacobiMatrix reduce_to_jacobi(const AntitreeSpec& spec) {
  if (const auto extent = spec.extent()) {
    const auto sizes = spec.with_depth(*extent).sizes();
    std::vector<double> a(sizes.size() - 1);
    for (std::size_t n = 0; n + 1 < sizes.size(); ++n) {
      a[n] = std::sqrt(static_cast<double>(sizes[n])) * std::sqrt(static_cast<double>(sizes[n + 1]));
    }
    return JacobiMatrix::finite(std::move(a), std::vector<double>(sizes.size(), 0.0));
  }

  const double alpha = spec.alpha();
  auto sizes = std::make_shared<SizeCache>(spec);
  JacobiMatrix j(
      "antitree(alpha=" + std::to_string(alpha) + ")",
      [sizes](Index n) { return static_cast<double>(std::sqrt((*sizes)(n)) * std::sqrt((*sizes)(n + 1))); },
      nullptr);
  // ⌊x⌋ >= x/2 for x >= 1 gives the lower constant; s_n <= n^α the upper one.
  j.with_power_law_bounds({alpha, 0.5, 1.0, 1}).with_profile({alpha, true}).with_diagonal_bound(0.0);
  if (alpha == 2.0) {
    j.with_telescoping_tail({"a_n = n(n+1): sum_{n>N} 1/(n(n+1)) = 1/(N+1)",
                             [](Index N) { return 1.0 / static_cast<double>(N + 1); }});
  }
  return j;
}

double IdentityDeviations::max() const { return std::max({projection, radial, jacobi}); }

std::string IdentityDeviations::worst() const {
  if (jacobi >= projection && jacobi >= radial) return "jacobi_conjugation";
  if (radial >= projection) return "radial_action";
  return "projection_commutes";
}

IdentityDeviations reduction_deviations(const Graph& g, const SphereDecomposition& d, const JacobiMatrix& j,
                                        const FiniteFunction& f) {
  const auto depth = static_cast<Index>(d.spheres.size()) - 1;
  if (depth < 3) throw ContractError("reduction checks need depth >= 3");
  const Index inner = depth - 2;  // last radius that is compared
  const double f_norm = f.cwiseAbs().maxCoeff();
  if (f_norm == 0) return {};

  const FiniteFunction pf = project_radial(d, f);
  const FiniteFunction apf = apply_adjacency(g, pf);
  const FiniteFunction papf = project_radial(d, apf);
  const FiniteFunction paf = project_radial(d, apply_adjacency(g, f));

  IdentityDeviations dev;
  for (Index v = 0; v < g.vertex_count(); ++v) {
    if (d.radius[static_cast<std::size_t>(v)] > inner) continue;
    dev.projection = std::max({dev.projection, std::abs(apf(v) - papf(v)), std::abs(paf(v) - apf(v))});
  }
  dev.projection /= f_norm;

  const RadialFunction ft = radial_values(d, pf);
  const RadialFunction action = radial_values(d, apf);
  const Eigen::VectorXd& s = ft.weights;
  for (Index n = 0; n <= inner; ++n) {
    const Complex below = n > 0 ? s(n - 1) * ft.values(n - 1) : Complex(0);
    const Complex expected = below + s(n + 1) * ft.values(n + 1);
    dev.radial = std::max(dev.radial, std::abs(action.values(n) - expected));
  }
  dev.radial /= f_norm;

  const Eigen::VectorXcd uf = weight_transform(ft);
  const Eigen::VectorXcd u_action = weight_transform(action);
  const double uf_norm = uf.cwiseAbs().maxCoeff();
  for (Index n = 0; n <= inner; ++n) {
    Complex jf = j.b(n) * uf(n) + j.a(n) * uf(n + 1);
    if (n > 0) jf += j.a(n - 1) * uf(n - 1);
    dev.jacobi = std::max(dev.jacobi, std::abs(u_action(n) - jf));
  }
  dev.jacobi = uf_norm > 0 ? dev.jacobi / uf_norm : 0.0;
  return dev;
}

namespace {
std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}
}  // namespace

ReductionCheckError::ReductionCheckError(ReductionReport report)
    : InconsistencyError("reduction identity '" + report.failing_identity.value_or("?") + "' deviates by " +
                         short_double(report.max_deviation) + " > tolerance " + short_double(report.tolerance)),
      report_(std::move(report)) {}

ReductionReport check_reduction_consistency(const AntitreeSpec& spec, Index depth, Index trials, double tol,
                                            std::uint64_t seed, std::optional<FaultInjection> fault) {
  if (depth < 3) throw ContractError("check_reduction_consistency needs depth >= 3");
  if (trials < 1) throw DomainError("trials must be positive");
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  if (fault && (fault->index < 0 || fault->index > depth - 3)) {
    throw DomainError("fault index must lie in [0, depth-3] so that the test support sees it");
  }

  const AntitreeSpec truncated = spec.with_depth(depth);
  const Graph g = build_antitree(truncated);
  const SphereDecomposition d = bfs_spheres(g, 0);
  JacobiMatrix j = reduce_to_jacobi(spec);
  if (fault) j = j.perturb_off_diagonal(fault->index, fault->delta);

  ReductionReport report;
  report.trials = trials;
  report.seed = seed;
  report.depth = depth;
  report.tolerance = tol;
  report.fault = fault;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index support = depth - 3;
  for (Index t = 0; t < trials; ++t) {
    FiniteFunction f = FiniteFunction::Zero(g.vertex_count());
    for (Index v = 0; v < g.vertex_count(); ++v) {
      if (d.radius[static_cast<std::size_t>(v)] > support) continue;
      const double re = normal(rng);
      const double im = normal(rng);
      f(v) = Complex(re, im);
    }
    const auto dev = reduction_deviations(g, d, j, f);
    report.per_identity.projection = std::max(report.per_identity.projection, dev.projection);
    report.per_identity.radial = std::max(report.per_identity.radial, dev.radial);
    report.per_identity.jacobi = std::max(report.per_identity.jacobi, dev.jacobi);
  }
  report.max_deviation = report.per_identity.max();
  if (report.max_deviation > tol) {
    report.failing_identity = report.per_identity.worst();
    throw ReductionCheckError(report);
  }
  return report;
}

}  // namespace defidx
