#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "defidx/graph.hpp"
#include "defidx/jacobi.hpp"
#include "defidx/operators.hpp"

namespace defidx {

/// f̃ for a radially symmetric f, with the sphere sizes as weights.
struct RadialFunction {
  Eigen::VectorXcd values;
  Eigen::VectorXd weights;

  /// Σ s_n |f̃(n)|²
  double weighted_norm_squared() const;
};

namespace detail {
void require_connected(const SphereDecomposition& d);
}

/// (Pf)(x): average of f over the sphere containing x.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_radial(const SphereDecomposition& d,
                                                                        const Eigen::MatrixBase<Derived>& f) {
  detail::require_connected(d);
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
  for (const auto& sphere : d.spheres) {
    Scalar mean(0);
    for (Index v : sphere) mean += f(v);
    mean /= static_cast<double>(sphere.size());
    for (Index v : sphere) out(v) = mean;
  }
  return out;
}

/// Sphere averages f̃(n) of f, weighted by s_n.
RadialFunction radial_values(const SphereDecomposition& d, const FiniteFunction& f);

/// The radial function on vertices: f(x) = f̃(|x|).
FiniteFunction lift_radial(const SphereDecomposition& d, const Eigen::VectorXcd& values);

/// U f̃(n) = sqrt(s_n) f̃(n); isometric from the weighted to the plain ℓ².
Eigen::VectorXcd weight_transform(const RadialFunction& rf);

/// Jacobi matrix with b_n = 0 and a_n = sqrt(s_n s_{n+1}), evaluable beyond the
/// materialised depth for power laws. Registers the analytic facts used by the
/// criteria: a_n between n^α/2 and (n+1)^α, the telescoping tail for α = 2.
JacobiMatrix reduce_to_jacobi(const AntitreeSpec& spec);

/// Normalised deviations of the three reduction identities for one test function.
struct IdentityDeviations {
  double projection = 0.0;  // A P f = P A P f and P A f = A P f
  double radial = 0.0;      // radial values of A P f = s_{n-1} f̃(n-1) + s_{n+1} f̃(n+1)
  double jacobi = 0.0;      // U (radial action) = J U f̃

  double max() const;
  std::string worst() const;
};

/// Deviations are sup-norm differences divided by the sup-norm of the test
/// function (f for the graph identities, U f̃ for the Jacobi one). The two
/// outermost spheres are excluded.
IdentityDeviations reduction_deviations(const Graph& g, const SphereDecomposition& d, const JacobiMatrix& j,
                                        const FiniteFunction& f);

struct FaultInjection {
  Index index = 1;
  double delta = 1e-3;
};

struct ReductionReport {
  double max_deviation = 0.0;
  Index trials = 0;
  std::uint64_t seed = 0;
  Index depth = 0;
  double tolerance = 0.0;
  IdentityDeviations per_identity;
  std::optional<std::string> failing_identity;
  std::optional<FaultInjection> fault;
};

/// Raised when a deviation exceeds the tolerance; carries the full report.
class ReductionCheckError : public InconsistencyError {
 public:
  explicit ReductionCheckError(ReductionReport report);
  const ReductionReport& report() const noexcept { return report_; }

 private:
  ReductionReport report_;
};

/// Random test functions supported in radii [0, depth-3], unit-normal real and
/// imaginary parts, drawn from a mt19937_64 seeded with `seed`.
ReductionReport check_reduction_consistency(const AntitreeSpec& spec, Index depth, Index trials, double tol,
                                            std::uint64_t seed = 0, std::optional<FaultInjection> fault = std::nullopt);

}  // namespace defidx
