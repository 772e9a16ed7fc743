#pragma once

#include <cmath>
#include <limits>

#include "defidx/jacobi.hpp"

namespace defidx::detail {

inline double log_add_exp(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  if (x < y) std::swap(x, y);
  return x + std::log1p(std::exp(y - x));
}

/// Forward three-term recurrence with explicit rescaling. The working pair
/// (prev, cur) is kept inside [1e-150, 1e150]; `log_scale` is what was divided out.
class RecurrenceStepper {
 public:
  RecurrenceStepper(Complex z, Complex u0, Complex u1) : z_(z), prev_(u0), cur_(u1) {
    rescale();
    log_sum_ = log_add_exp(log_abs2(prev_), log_abs2(cur_));
  }

  /// Advances from index n (cur) to n+1, given a_{n-1}, b_n, a_n.
  void step(double a_prev, double b_n, double a_n) {
    const Complex next = ((z_ - b_n) * cur_ - a_prev * prev_) / a_n;
    prev_ = cur_;
    cur_ = next;
    rescale();
    log_sum_ = log_add_exp(log_sum_, log_abs2(cur_));
  }

  Complex current() const noexcept { return cur_; }
  double log_scale() const noexcept { return log_scale_; }
  /// log |u_true(cur)|^2
  double log_abs2_current() const { return log_abs2(cur_); }
  /// log of Σ |u_true|^2 up to and including the current index
  double log_partial_sum() const noexcept { return log_sum_; }

 private:
  double log_abs2(Complex v) const {
    const double m = std::abs(v);
    if (m == 0) return -std::numeric_limits<double>::infinity();
    return 2 * (std::log(m) + log_scale_);
  }

  void rescale() {
    const double m = std::max(std::abs(prev_), std::abs(cur_));
    if (m > 1e150 || (m < 1e-150 && m > 0)) {
      prev_ /= m;
      cur_ /= m;
      log_scale_ += std::log(m);
    }
  }

  Complex z_;
  Complex prev_;
  Complex cur_;
  double log_scale_ = 0.0;
  double log_sum_ = -std::numeric_limits<double>::infinity();
};

}  // namespace defidx::detail
