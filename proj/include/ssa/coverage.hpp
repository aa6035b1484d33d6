#pragma once

// Coverage of a target disk by the union of vehicles' sight sectors,
// accumulated over time steps, plus an exhaustive minimum-cover search.
//
// The union of circular sectors clipped to a disk has no convenient closed
// form, so every estimate here is a Monte Carlo fraction over uniform points
// in the target disk. Points depend only on (target, sample count, seed), so
// two calls with the same triple evaluate different arc sets on the same
// point set; monotonicity and union-bound comparisons are exact on it.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ssa/error.hpp"
#include "ssa/geometry.hpp"
#include "ssa/rng.hpp"

namespace ssa {

/// Circular sector {apex + r(cos phi, sin phi) : 0 <= r <= radius,
/// |phi - heading| <= half_angle}.
struct SightArc {
  Position apex;
  double heading = 0.0;
  double half_angle = std::numbers::pi;
  double radius = 1.0;

  void validate() const {
    detail::require(std::isfinite(radius) && radius > 0.0, ErrorKind::invalid_argument,
                    "sight radius must be positive");
    detail::require(half_angle > 0.0 && half_angle <= std::numbers::pi, ErrorKind::invalid_argument,
                    "sight half angle must lie in (0, pi]");
  }

  bool contains(Position p) const {
    const double dx = p.x - apex.x;
    const double dy = p.y - apex.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 > radius * radius) return false;
    if (half_angle >= std::numbers::pi || d2 == 0.0) return true;
    double delta = std::atan2(dy, dx) - heading;
    delta = std::remainder(delta, 2.0 * std::numbers::pi);
    return std::abs(delta) <= half_angle;
  }
};

struct TargetDisk {
  Position center;
  double radius = 1.0;

  void validate() const {
    detail::require(std::isfinite(radius) && radius > 0.0, ErrorKind::invalid_argument,
                    "target radius must be positive");
  }
};

struct CoverageEstimate {
  double rate = 0.0;
  std::size_t sample_points = 0;
  double std_err = 0.0;
};

/// Ranges for randomized sight sectors. Uniform on each interval.
struct SightRanges {
  double half_angle_min = std::numbers::pi / 12.0;
  double half_angle_max = std::numbers::pi / 3.0;
  double radius_min = 40.0;
  double radius_max = 100.0;

  void validate() const {
    detail::require(half_angle_min > 0.0 && half_angle_min <= half_angle_max &&
                        half_angle_max <= std::numbers::pi,
                    ErrorKind::invalid_config, "sight half-angle range must lie in (0, pi]");
    detail::require(radius_min > 0.0 && radius_min <= radius_max, ErrorKind::invalid_config,
                    "sight radius range must be positive and ordered");
  }
};

inline SightArc sample_sight(Rng& rng, Position apex, double heading, const SightRanges& ranges) {
  SightArc arc;
  arc.apex = apex;
  arc.heading = heading;
  arc.half_angle = rng.uniform(ranges.half_angle_min, ranges.half_angle_max);
  arc.radius = rng.uniform(ranges.radius_min, ranges.radius_max);
  return arc;
}

inline constexpr std::size_t kMinCoverageSamples = 1000;
inline constexpr std::size_t kMaxCoverArcs = 22;

/// Uniform points in a target disk, drawn from a seed.
inline std::vector<Position> sample_disk_points(const TargetDisk& target, std::size_t count,
                                                std::uint64_t seed) {
  target.validate();
  Rng rng(seed);
  std::vector<Position> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = target.radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    points.push_back({target.center.x + r * std::cos(theta), target.center.y + r * std::sin(theta)});
  }
  return points;
}

inline CoverageEstimate make_estimate(std::size_t covered, std::size_t total) {
  CoverageEstimate est;
  est.sample_points = total;
  est.rate = total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
  est.std_err = total == 0 ? 0.0 : std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(total));
  return est;
}

/// Running union of sight sectors over a fixed point set in the target.
class CoverageAccumulator {
 public:
  CoverageAccumulator(const TargetDisk& target, std::size_t sample_points, std::uint64_t seed)
      : points_(sample_disk_points(target, sample_points, seed)), covered_(points_.size(), 0) {}

  void add(const SightArc& arc) {
    arc.validate();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!covered_[i] && arc.contains(points_[i])) {
        covered_[i] = 1;
        ++covered_count_;
      }
    }
  }

  void add(std::span<const SightArc> arcs) {
    for (const auto& arc : arcs) add(arc);
  }

  CoverageEstimate estimate() const { return make_estimate(covered_count_, points_.size()); }
  double rate() const { return estimate().rate; }

 private:
  std::vector<Position> points_;
  std::vector<std::uint8_t> covered_;
  std::size_t covered_count_ = 0;
};

/// Monte Carlo estimate of |(union of arcs) ∩ target| / |target|.
inline CoverageEstimate coverage_rate(std::span<const SightArc> arcs, const TargetDisk& target,
                                      std::size_t sample_points, std::uint64_t seed) {
  detail::require(sample_points >= kMinCoverageSamples, ErrorKind::invalid_argument,
                  "coverage needs at least 1000 sample points");
  CoverageAccumulator acc(target, sample_points, seed);
  acc.add(arcs);
  return acc.estimate();
}

/// Flattens per-time-step sight sectors (t <= t0) into one collection.
inline std::vector<SightArc> accumulate_vision(std::span<const std::vector<SightArc>> steps) {
  std::vector<SightArc> out;
  for (const auto& step : steps) out.insert(out.end(), step.begin(), step.end());
  return out;
}

struct CoverSubset {
  std::vector<std::size_t> indices;  // ascending positions in the input collection
  CoverageEstimate estimate;
};

/// Smallest subset of `arcs` whose coverage on a shared point set reaches
/// `threshold`. Subsets are visited by size, then lexicographically by index,
/// so the first hit is the lexicographically smallest minimum cover.
/// Returns nullopt when even the full collection falls short.
inline std::optional<CoverSubset> min_cover_subset(std::span<const SightArc> arcs,
                                                   const TargetDisk& target, double threshold,
                                                   std::size_t sample_points = 10000,
                                                   std::uint64_t seed = 0) {
  if (arcs.size() > kMaxCoverArcs) {
    throw Error(ErrorKind::capacity, "exhaustive cover search supports at most 22 arcs");
  }
  detail::require(sample_points >= kMinCoverageSamples, ErrorKind::invalid_argument,
                  "coverage needs at least 1000 sample points");
  for (const auto& arc : arcs) arc.validate();

  const auto points = sample_disk_points(target, sample_points, seed);
  const std::size_t words = (points.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(arcs.size(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (arcs[a].contains(points[i])) masks[a][i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }

  std::vector<std::uint64_t> acc(words);
  auto covered_by = [&](std::span<const std::size_t> chosen) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t a : chosen) {
      for (std::size_t w = 0; w < words; ++w) acc[w] |= masks[a][w];
    }
    std::size_t count = 0;
    for (auto w : acc) count += static_cast<std::size_t>(std::popcount(w));
    return count;
  };
  auto meets = [&](std::size_t covered) {
    return make_estimate(covered, points.size()).rate >= threshold;
  };

  const std::size_t n = arcs.size();
  {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    if (!meets(covered_by(all))) return std::nullopt;
  }

  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;
    while (true) {
      const std::size_t covered = covered_by(combo);
      if (meets(covered)) return CoverSubset{combo, make_estimate(covered, points.size())};
      // Next k-combination of {0..n-1} in lexicographic order.
      std::size_t i = k;
      while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return std::nullopt;  // unreachable: the full set met the threshold
}

}  // namespace ssa
