#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "defidx/errors.hpp"

namespace defidx {

/// Exact evaluation of ⌊n^α⌋ for a fixed positive exponent.
///
/// Integer exponents use checked integer powers. Otherwise n^α is evaluated in
/// extended precision and accepted when it is clearly away from an integer.
/// Close calls are settled exactly: if α is (to within 4 ulp) a rational p/q
/// with q ≤ 1000 we compare n^p against k^q in arbitrary precision, and if not
/// we re-evaluate with 100 digits and raise DomainError when n^α still lies
/// within 1e-9 of an integer.
class FloorPower {
 public:
  explicit FloorPower(double alpha);

  double exponent() const noexcept { return alpha_; }
  bool integral() const noexcept { return integral_; }
  /// (p, q) when α was recognised as a small-denominator rational.
  std::optional<std::pair<std::int64_t, std::int64_t>> rational() const noexcept { return rational_; }

  /// ⌊n^α⌋; throws DomainError if the result does not fit in 63 bits.
  std::uint64_t operator()(std::uint64_t n) const;

  /// ⌊n^α⌋ as a real: exact below 2^53, plain extended-precision floor above
  /// (where the floor is below double resolution anyway).
  long double approx(std::uint64_t n) const;

 private:
  // ⌊x⌋ for x ≈ n^α computed in extended precision, n >= 2, α not integral
  std::uint64_t floor_of(std::uint64_t n, long double x) const;

  double alpha_;
  bool integral_ = false;
  std::optional<std::pair<std::int64_t, std::int64_t>> rational_;
};

/// (s_0, ..., s_{n_max}) with s_0 = 1 and s_n = ⌊n^α⌋.
std::vector<std::uint64_t> sphere_sizes(double alpha, Index n_max);

}  // namespace defidx
