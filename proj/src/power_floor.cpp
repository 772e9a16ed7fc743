#include "defidx/power_floor.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace defidx {

namespace mp = boost::multiprecision;

namespace {

constexpr long double kTwo63 = 9223372036854775808.0L;
constexpr long double kTwo53 = 9007199254740992.0L;
constexpr double kGuardBand = 1e-9;

// Continued-fraction convergents of alpha; returns the first one within 4 ulp.
std::optional<std::pair<std::int64_t, std::int64_t>> small_rational(double alpha) {
  const double ulp = std::nextafter(alpha, std::numeric_limits<double>::infinity()) - alpha;
  long double x = alpha;
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  std::int64_t k_prev = 0, k = 1;
  long double frac = x - std::floor(x);
  for (int iter = 0; iter < 40; ++iter) {
    if (std::fabs(alpha - static_cast<double>(static_cast<long double>(h) / k)) <= 4 * ulp) {
      return std::make_pair(h, k);
    }
    if (frac == 0) break;
    x = 1 / frac;
    const auto digit = static_cast<std::int64_t>(std::floor(x));
    frac = x - std::floor(x);
    const std::int64_t h_next = digit * h + h_prev;
    const std::int64_t k_next = digit * k + k_prev;
    if (k_next > 1000) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

std::uint64_t checked_int_pow(std::uint64_t n, unsigned e) {
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < e; ++i) {
    acc *= n;
    if (acc >= (static_cast<unsigned __int128>(1) << 63)) {
      throw DomainError("sphere size n^alpha exceeds 2^63");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace

FloorPower::FloorPower(double alpha) : alpha_(alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    throw DomainError("power-law exponent must be a finite positive number");
  }
  integral_ = alpha == std::floor(alpha) && alpha <= 63;
  if (!integral_) {
    rational_ = small_rational(alpha);
    if (rational_ && rational_->second == 1) {
      // within 4 ulp of an integer but not equal to it: treat as that integer.
      integral_ = rational_->first <= 63;
      alpha_ = static_cast<double>(rational_->first);
      rational_.reset();
    }
  }
}

std::uint64_t FloorPower::operator()(std::uint64_t n) const {
  if (n <= 1) return n;
  if (integral_) return checked_int_pow(n, static_cast<unsigned>(alpha_));
  return floor_of(n, std::pow(static_cast<long double>(n), static_cast<long double>(alpha_)));
}

std::uint64_t FloorPower::floor_of(std::uint64_t n, long double x) const {
  if (!(x < kTwo63)) throw DomainError("sphere size n^alpha exceeds 2^63");
  const long double nearest = std::nearbyint(x);
  const long double dist = std::fabs(x - nearest);
  const long double err = 64 * LDBL_EPSILON * x;
  if (dist > std::max<long double>(2 * err, kGuardBand)) {
    return static_cast<std::uint64_t>(std::floor(x));
  }

  const auto k = static_cast<std::uint64_t>(nearest);
  if (rational_) {
    const auto [p, q] = *rational_;
    const mp::cpp_int lhs = mp::pow(mp::cpp_int(n), static_cast<unsigned>(p));
    const mp::cpp_int rhs = mp::pow(mp::cpp_int(k), static_cast<unsigned>(q));
    return lhs >= rhs ? k : k - 1;
  }

  using Big = mp::cpp_bin_float_100;
  const Big v = mp::pow(Big(n), Big(alpha_));
  const Big rounded = mp::round(v);
  if (mp::abs(v - rounded) <= Big(kGuardBand)) {
    throw DomainError("n^alpha lies within 1e-9 of an integer; floor is not certifiable (n=" +
                      std::to_string(n) + ")");
  }
  return static_cast<std::uint64_t>(mp::floor(v));
}

long double FloorPower::approx(std::uint64_t n) const {
  if (n <= 1) return static_cast<long double>(n);
  const long double x = std::pow(static_cast<long double>(n), static_cast<long double>(alpha_));
  if (!(x < kTwo53)) return std::floor(x);
  if (integral_) return static_cast<long double>(checked_int_pow(n, static_cast<unsigned>(alpha_)));
  return static_cast<long double>(floor_of(n, x));
}

std::vector<std::uint64_t> sphere_sizes(double alpha, Index n_max) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  const FloorPower power(alpha);
  std::vector<std::uint64_t> sizes(static_cast<std::size_t>(n_max) + 1);
  sizes[0] = 1;
  for (Index n = 1; n <= n_max; ++n) sizes[static_cast<std::size_t>(n)] = power(static_cast<std::uint64_t>(n));
  return sizes;
}

}  // namespace defidx
