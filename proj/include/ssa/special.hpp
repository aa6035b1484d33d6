#pragma once

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series expansion below x < a + 1, modified-Lentz continued fraction above.

#include <cmath>
#include <limits>

#include "ssa/error.hpp"

namespace ssa::special {

namespace detail {

inline constexpr int kMaxIterations = 100000;
inline constexpr double kEps = 1e-16;
inline constexpr double kTiny = 1e-300;

inline double log_prefactor(double a, double x) { return -x + a * std::log(x) - std::lgamma(a); }

// P(a, x) by the power series; valid for x < a + 1.
inline double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

// Q(a, x) by continued fraction; valid for x >= a + 1.
inline double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

inline void check_args(double a, double x) {
  ssa::detail::require(a > 0.0 && std::isfinite(a), ErrorKind::invalid_argument,
                       "incomplete gamma shape must be positive");
  ssa::detail::require(x >= 0.0 && !std::isnan(x), ErrorKind::invalid_argument,
                       "incomplete gamma argument must be non-negative");
}

}  // namespace detail

inline double gamma_p(double a, double x) {
  detail::check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::lower_series(a, x);
  return 1.0 - detail::upper_fraction(a, x);
}

inline double gamma_q(double a, double x) {
  detail::check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::lower_series(a, x);
  return detail::upper_fraction(a, x);
}

}  // namespace ssa::special
