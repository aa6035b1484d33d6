#pragma once

// Closed-form hop and SSA-latency laws.
//
// Gamma laws are parameterized by (shape, rate), density
//   rate^shape / Gamma(shape) * x^(shape-1) * exp(-rate * x).
// Not (shape, scale): callers converting from a scale must pass 1/scale.
//
// A single hop distance D ~ Gamma(k, l) maps to hop time D/c ~ Gamma(k, c l);
// a path of N i.i.d. hops then takes Gamma(N k, c l), which follows from the
// MGF product (rate / (rate - t))^(N k).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ssa/error.hpp"
#include "ssa/rng.hpp"
#include "ssa/special.hpp"

namespace ssa {

struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;

  GammaParams() = default;
  GammaParams(double shape_, double rate_) : shape(shape_), rate(rate_) {
    detail::require(std::isfinite(shape_) && shape_ > 0.0, ErrorKind::invalid_argument,
                    "gamma shape must be positive");
    detail::require(std::isfinite(rate_) && rate_ > 0.0, ErrorKind::invalid_argument,
                    "gamma rate must be positive");
  }

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
  /// Mode (shape - 1) / rate for shape >= 1, else 0.
  double mode() const { return shape >= 1.0 ? (shape - 1.0) / rate : 0.0; }

  friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

struct HopTime {
  double seconds = 0.0;
};

struct SsaLatencyLaw {
  std::uint64_t hops = 1;
  GammaParams per_hop;
  GammaParams total;
  // Worst relative MGF product mismatch on {rate/4, rate/2, 3 rate/4}.
  double mgf_gap = 0.0;
};

inline double gamma_pdf(const GammaParams& p, double x) {
  detail::require(x >= 0.0, ErrorKind::invalid_argument, "gamma_pdf needs x >= 0");
  if (x == 0.0) {
    if (p.shape == 1.0) return p.rate;
    return p.shape < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double log_f = p.shape * std::log(p.rate) - std::lgamma(p.shape) +
                       (p.shape - 1.0) * std::log(x) - p.rate * x;
  return std::exp(log_f);
}

inline double gamma_cdf(const GammaParams& p, double x) {
  detail::require(x >= 0.0, ErrorKind::invalid_argument, "gamma_cdf needs x >= 0");
  return special::gamma_p(p.shape, p.rate * x);
}

/// Exact Gamma draw. Shape 1 uses the inverse-CDF exponential; other shapes
/// use Marsaglia-Tsang, with the shape < 1 boost U^(1/shape).
inline double gamma_sample(const GammaParams& p, Rng& rng) {
  if (p.shape == 1.0) return rng.exponential(p.rate);
  const double a = p.shape < 1.0 ? p.shape + 1.0 : p.shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double value;
  while (true) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      value = d * v;
      break;
    }
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      value = d * v;
      break;
    }
  }
  if (p.shape < 1.0) {
    double u;
    do u = rng.uniform(); while (u == 0.0);
    value *= std::pow(u, 1.0 / p.shape);
  }
  return value / p.rate;
}

inline double gamma_sample(const GammaParams& p, std::uint64_t seed) {
  Rng rng(seed);
  return gamma_sample(p, rng);
}

/// Law of D / speed when D ~ `distance_law`.
inline GammaParams scale_hop(const GammaParams& distance_law, double speed) {
  detail::require(std::isfinite(speed) && speed > 0.0, ErrorKind::invalid_argument,
                  "speed must be positive");
  return GammaParams(distance_law.shape, distance_law.rate * speed);
}

/// E[exp(tX)] = (rate / (rate - t))^shape, defined for t < rate.
inline double gamma_mgf(const GammaParams& p, double t) {
  if (!(t < p.rate)) throw Error(ErrorKind::domain_error, "gamma MGF diverges for t >= rate");
  return std::pow(p.rate / (p.rate - t), p.shape);
}

/// Largest relative gap |M_total(t) - M_hop(t)^N| / M_total(t) over the
/// given t values; every t must lie below the rate.
inline double mgf_product_gap(const SsaLatencyLaw& law, const std::vector<double>& ts) {
  double worst = 0.0;
  for (double t : ts) {
    const double total = gamma_mgf(law.total, t);
    const double product = std::pow(gamma_mgf(law.per_hop, t), static_cast<double>(law.hops));
    worst = std::max(worst, std::abs(total - product) / total);
  }
  return worst;
}

/// t in {rate/4, rate/2, 3 rate/4}.
inline std::vector<double> mgf_check_grid(const GammaParams& p) {
  return {0.25 * p.rate, 0.5 * p.rate, 0.75 * p.rate};
}

/// Law of the sum of `hops` i.i.d. per-hop Gamma times. The MGF product
/// identity is evaluated on the check grid and stored in `mgf_gap`.
inline SsaLatencyLaw sum_hops_law(std::uint64_t hops, const GammaParams& per_hop) {
  detail::require(hops >= 1, ErrorKind::invalid_argument, "hop count must be >= 1");
  SsaLatencyLaw law{hops, per_hop, GammaParams(static_cast<double>(hops) * per_hop.shape, per_hop.rate)};
  law.mgf_gap = mgf_product_gap(law, mgf_check_grid(per_hop));
  return law;
}

inline HopTime hop_time(double distance_m, double speed_mps) {
  detail::require(distance_m >= 0.0, ErrorKind::invalid_argument, "distance must be >= 0");
  detail::require(speed_mps > 0.0, ErrorKind::invalid_argument, "speed must be positive");
  return {distance_m / speed_mps};
}

inline constexpr double kSpeedOfLight = 299792458.0;

}  // namespace ssa
