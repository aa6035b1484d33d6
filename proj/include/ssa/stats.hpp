#pragma once

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ssa/error.hpp"
#include "ssa/latency_model.hpp"
#include "ssa/special.hpp"

namespace ssa {

/// Sorted non-negative samples with a declared unit (e.g. "ms").
class EmpiricalDist {
 public:
  EmpiricalDist() = default;
  EmpiricalDist(std::vector<double> samples, std::string unit)
      : samples_(std::move(samples)), unit_(std::move(unit)) {
    for (double x : samples_) {
      detail::require(std::isfinite(x) && x >= 0.0, ErrorKind::invalid_argument,
                      "samples must be finite and non-negative");
    }
    std::sort(samples_.begin(), samples_.end());
  }

  const std::vector<double>& samples() const { return samples_; }
  const std::string& unit() const { return unit_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double min() const { return nonempty().front(); }
  double max() const { return nonempty().back(); }

  double mean() const {
    const auto& s = nonempty();
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  }

  /// Unbiased sample variance; 0 for a single sample.
  double variance() const {
    const auto& s = nonempty();
    if (s.size() < 2) return 0.0;
    const double m = mean();
    double acc = 0.0;
    for (double x : s) acc += (x - m) * (x - m);
    return acc / static_cast<double>(s.size() - 1);
  }

  /// Inverse of the empirical CDF: the smallest sample x with F(x) >= q.
  double quantile(double q) const {
    const auto& s = nonempty();
    detail::require(q >= 0.0 && q <= 1.0, ErrorKind::invalid_argument, "quantile must lie in [0, 1]");
    const auto n = static_cast<double>(s.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = idx == 0 ? 0 : idx - 1;
    return s[std::min(idx, s.size() - 1)];
  }

 private:
  const std::vector<double>& nonempty() const {
    if (samples_.empty()) throw Error(ErrorKind::empty_distribution, "empty sample set");
    return samples_;
  }

  std::vector<double> samples_;
  std::string unit_ = "ms";
};

struct GofReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool reject_at_01 = false;
  std::size_t dof = 0;  // chi-square only
};

/// Right-continuous step function #{x_i <= x} / n.
inline double empirical_cdf(const EmpiricalDist& dist, double x) {
  const auto& s = dist.samples();
  if (s.empty()) throw Error(ErrorKind::empty_distribution, "empty sample set");
  const auto below = std::upper_bound(s.begin(), s.end(), x) - s.begin();
  return static_cast<double>(below) / static_cast<double>(s.size());
}

struct Histogram {
  std::vector<double> edges;      // bins + 1 entries, edges.front() == 0
  std::vector<double> densities;  // count / (n * width)
  std::vector<std::size_t> counts;

  double width() const { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
};

/// Equal-width bins over [0, max]; the last bin is closed on the right.
inline Histogram histogram(const EmpiricalDist& dist, std::size_t bins) {
  detail::require(bins >= 1, ErrorKind::invalid_argument, "histogram needs at least one bin");
  const double top = dist.max() > 0.0 ? dist.max() : 1.0;
  const double width = top / static_cast<double>(bins);
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = width * static_cast<double>(i);
  h.edges.back() = top;
  h.counts.assign(bins, 0);
  for (double x : dist.samples()) {
    auto b = static_cast<std::size_t>(x / width);
    ++h.counts[std::min(b, bins - 1)];
  }
  const double norm = 1.0 / (static_cast<double>(dist.size()) * width);
  h.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.densities[i] = static_cast<double>(h.counts[i]) * norm;
  return h;
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double p;
  if (lambda < 1.18) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += (k % 2 == 1 ? term : -term);
      if (term < 1e-18) break;
    }
    p = 2.0 * sum;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline constexpr std::size_t kMinKsSamples = 10;

/// One-sample Kolmogorov-Smirnov test of `dist` against a continuous CDF.
/// p-value from the asymptotic distribution of sqrt(n) D.
template <std::invocable<double> Cdf>
GofReport ks_test(const EmpiricalDist& dist, Cdf&& cdf) {
  const auto& s = dist.samples();
  if (s.size() < kMinKsSamples) {
    throw Error(ErrorKind::insufficient_samples, "KS test needs at least 10 samples");
  }
  const auto n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  GofReport r;
  r.statistic = d;
  r.n = s.size();
  r.p_value = kolmogorov_survival(std::sqrt(n) * d);
  r.reject_at_01 = r.p_value < 0.01;
  return r;
}

inline GofReport ks_test(const EmpiricalDist& dist, const GammaParams& law) {
  return ks_test(dist, [&](double x) { return gamma_cdf(law, x); });
}

/// Chi-square goodness of fit of integer counts to Poisson(mean). Cells
/// 0, 1, ..., K-1 and a tail cell >= K are pooled left to right until each
/// expected count reaches 5; a short final remainder joins its neighbor.
inline GofReport chi_square_poisson(std::span<const std::uint64_t> counts, double mean) {
  if (counts.empty()) throw Error(ErrorKind::insufficient_samples, "no counts supplied");
  detail::require(std::isfinite(mean) && mean > 0.0, ErrorKind::invalid_argument,
                  "Poisson mean must be positive");
  const auto total = static_cast<double>(counts.size());
  const std::uint64_t max_seen = *std::max_element(counts.begin(), counts.end());
  const auto span_hint = static_cast<std::uint64_t>(std::ceil(mean + 10.0 * std::sqrt(mean) + 10.0));
  const std::uint64_t tail_at = std::max(max_seen + 1, span_hint);

  std::vector<double> observed(tail_at + 1, 0.0);
  for (auto c : counts) observed[std::min(c, tail_at)] += 1.0;
  std::vector<double> expected(tail_at + 1, 0.0);
  const double log_mean = std::log(mean);
  for (std::uint64_t k = 0; k < tail_at; ++k) {
    const auto kd = static_cast<double>(k);
    expected[k] = total * std::exp(kd * log_mean - mean - std::lgamma(kd + 1.0));
  }
  // P(X >= K) = P(K, mean) for integer K >= 1.
  expected[tail_at] = total * special::gamma_p(static_cast<double>(tail_at), mean);

  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs_acc = 0.0, exp_acc = 0.0;
  for (std::uint64_t k = 0; k <= tail_at; ++k) {
    obs_acc += observed[k];
    exp_acc += expected[k];
    if (exp_acc >= 5.0) {
      cells.emplace_back(obs_acc, exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(obs_acc, exp_acc);
    } else {
      cells.back().first += obs_acc;
      cells.back().second += exp_acc;
    }
  }
  if (cells.size() < 2) {
    throw Error(ErrorKind::insufficient_samples, "too few counts for two pooled chi-square cells");
  }

  GofReport r;
  r.n = counts.size();
  for (const auto& [o, e] : cells) r.statistic += (o - e) * (o - e) / e;
  r.dof = cells.size() - 1;
  r.p_value = special::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic);
  r.reject_at_01 = r.p_value < 0.01;
  return r;
}

/// Method of moments: shape = mean^2 / var, rate = mean / var.
inline GammaParams fit_gamma_moments(const EmpiricalDist& dist) {
  const double m = dist.mean();
  const double v = dist.variance();
  if (!(v > 0.0) || !(m > 0.0)) {
    throw Error(ErrorKind::degenerate_distribution, "moment fit needs positive mean and variance");
  }
  return GammaParams(m * m / v, m / v);
}

/// One value per line under a "<quantity>_<unit>" header.
inline void write_samples_csv(std::ostream& out, const EmpiricalDist& dist,
                              const std::string& quantity = "latency") {
  out << quantity << '_' << dist.unit() << '\n';
  char buf[64];
  for (double x : dist.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << '\n';
  }
}

inline EmpiricalDist read_samples_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::invalid_argument, "missing CSV header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto sep = header.rfind('_');
  std::string unit = sep == std::string::npos ? std::string{} : header.substr(sep + 1);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_argument, "bad sample value: " + line);
    }
    if (used != line.size()) throw Error(ErrorKind::invalid_argument, "bad sample value: " + line);
    values.push_back(v);
  }
  return EmpiricalDist(std::move(values), std::move(unit));
}

}  // namespace ssa
