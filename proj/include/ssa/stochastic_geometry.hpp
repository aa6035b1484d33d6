#pragma once

// Homogeneous Poisson point process of vehicles in a bounded rectangle,
// with a uniform-grid index for neighbor queries.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "ssa/coverage.hpp"
#include "ssa/error.hpp"
#include "ssa/geometry.hpp"
#include "ssa/rng.hpp"
#include "ssa/special.hpp"

namespace ssa {

using VehicleId = std::uint32_t;

struct Vehicle {
  VehicleId id = 0;
  Position position;
  double heading = 0.0;  // radians in [0, 2pi)
  double speed = 0.0;    // m/s
  double tx_range = 100.0;
  SightArc sight;
};

/// Per-vehicle attributes drawn alongside each PPP point.
struct VehicleTraits {
  double tx_range = 100.0;
  double speed_min = 0.0;
  double speed_max = 30.0;
  SightRanges sight;

  void validate() const {
    detail::require(std::isfinite(tx_range) && tx_range > 0.0, ErrorKind::invalid_config,
                    "tx_range must be positive");
    detail::require(speed_min >= 0.0 && speed_min <= speed_max && std::isfinite(speed_max),
                    ErrorKind::invalid_config, "speed range must be non-negative and ordered");
    sight.validate();
  }
};

/// Immutable set of vehicles plus a grid index whose cell size defaults to
/// the transmission range, so any in-range neighbor lies in the 3x3 block
/// around the querying vehicle's cell. Vehicle ids equal their positions in
/// vehicles().
class VehicleField {
 public:
  VehicleField(WorldArea area, std::vector<Vehicle> vehicles, double cell_size)
      : area_(area), vehicles_(std::move(vehicles)), cell_size_(cell_size) {
    detail::require(std::isfinite(cell_size) && cell_size > 0.0, ErrorKind::invalid_argument,
                    "grid cell size must be positive");
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      detail::require(area_.contains(vehicles_[i].position), ErrorKind::invalid_argument,
                      "vehicle position outside the world");
      vehicles_[i].id = static_cast<VehicleId>(i);
    }
    build_index();
  }

  const WorldArea& area() const { return area_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const Vehicle& operator[](VehicleId id) const { return vehicles_.at(id); }
  std::size_t size() const { return vehicles_.size(); }
  bool empty() const { return vehicles_.empty(); }
  double cell_size() const { return cell_size_; }

  /// Ids in grid cell (cx, cy), ascending.
  std::span<const VehicleId> cell(int cx, int cy) const {
    const auto c = static_cast<std::size_t>(cy) * static_cast<std::size_t>(cols_) +
                   static_cast<std::size_t>(cx);
    return {cell_items_.data() + cell_start_[c], cell_start_[c + 1] - cell_start_[c]};
  }
  int cols() const { return cols_; }
  int rows() const { return rows_; }

  std::pair<int, int> cell_of(Position p) const {
    const double fx = std::clamp(std::floor(p.x / cell_size_), 0.0, cols_ - 1.0);
    const double fy = std::clamp(std::floor(p.y / cell_size_), 0.0, rows_ - 1.0);
    return {static_cast<int>(fx), static_cast<int>(fy)};
  }

  /// Closest vehicle to `p` within `range` (inclusive) that is not excluded.
  /// Ties go to the lowest id. `range` may be +infinity.
  template <class Excluded>
  std::optional<VehicleId> nearest_to(Position p, double range, Excluded&& excluded) const {
    if (vehicles_.empty()) return std::nullopt;
    const double range2 = range * range;
    double best2 = std::numeric_limits<double>::infinity();
    std::optional<VehicleId> best;
    const auto [cx, cy] = cell_of(p);
    const int max_ring = std::max(cols_, rows_);
    for (int k = 0; k <= max_ring; ++k) {
      if (k >= 1) {
        const double gap = (k - 1) * cell_size_;
        if (gap * gap > best2 || gap > range) break;
      }
      auto visit = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= cols_ || y >= rows_) return;
        for (VehicleId id : cell(x, y)) {
          if (excluded(id)) continue;
          const double d2 = squared_distance(p, vehicles_[id].position);
          if (d2 > range2) continue;
          if (d2 < best2 || (d2 == best2 && best && id < *best)) {
            best2 = d2;
            best = id;
          }
        }
      };
      if (k == 0) {
        visit(cx, cy);
        continue;
      }
      for (int x = cx - k; x <= cx + k; ++x) {
        visit(x, cy - k);
        visit(x, cy + k);
      }
      for (int y = cy - k + 1; y <= cy + k - 1; ++y) {
        visit(cx - k, y);
        visit(cx + k, y);
      }
    }
    return best;
  }

  /// Ids of all vehicles within `radius` of `center`, ascending.
  std::vector<VehicleId> within(Position center, double radius) const {
    std::vector<VehicleId> out;
    if (vehicles_.empty() || radius < 0.0) return out;
    const double r2 = radius * radius;
    const auto [x0, y0] = cell_of({center.x - radius, center.y - radius});
    const auto [x1, y1] = cell_of({center.x + radius, center.y + radius});
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        for (VehicleId id : cell(x, y)) {
          if (squared_distance(center, vehicles_[id].position) <= r2) out.push_back(id);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  void build_index() {
    cols_ = std::max(1, static_cast<int>(std::ceil(area_.width() / cell_size_)));
    rows_ = std::max(1, static_cast<int>(std::ceil(area_.depth() / cell_size_)));
    const auto cells = static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
    cell_start_.assign(cells + 1, 0);
    std::vector<std::size_t> owner(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto [cx, cy] = cell_of(vehicles_[i].position);
      owner[i] = static_cast<std::size_t>(cy) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(cx);
      ++cell_start_[owner[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
    cell_items_.resize(vehicles_.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      cell_items_[fill[owner[i]]++] = static_cast<VehicleId>(i);
    }
  }

  WorldArea area_;
  std::vector<Vehicle> vehicles_;
  double cell_size_;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<std::size_t> cell_start_;
  std::vector<VehicleId> cell_items_;
};

/// Draws a vehicle at a uniform position with traits from `traits`.
inline Vehicle sample_vehicle(Rng& rng, const WorldArea& area, const VehicleTraits& traits) {
  Vehicle v;
  v.position = {rng.uniform(0.0, area.width()), rng.uniform(0.0, area.depth())};
  v.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  v.speed = rng.uniform(traits.speed_min, traits.speed_max);
  v.tx_range = traits.tx_range;
  v.sight = sample_sight(rng, v.position, v.heading, traits.sight);
  return v;
}

/// Homogeneous PPP: count ~ Poisson(intensity * |area|), positions i.i.d.
/// uniform. Pure function of the arguments.
inline VehicleField sample_ppp(AreaIntensity intensity, const WorldArea& area, std::uint64_t seed,
                               const VehicleTraits& traits = {}) {
  traits.validate();
  Rng rng(seed);
  const auto count = rng.poisson(intensity.expected_count(area.area()));
  std::vector<Vehicle> vehicles;
  vehicles.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) vehicles.push_back(sample_vehicle(rng, area, traits));
  return VehicleField(area, std::move(vehicles), traits.tx_range);
}

/// Number of vehicles at Euclidean distance <= radius from center.
inline std::size_t count_in_disk(const VehicleField& field, Position center, double radius) {
  detail::require(radius >= 0.0, ErrorKind::invalid_argument, "radius must be non-negative");
  return field.within(center, radius).size();
}

/// First neighbor of `from`: the closest other vehicle within `range` for
/// which `excluded(id)` is false. Empty when `from` is isolated.
template <std::predicate<VehicleId> Excluded>
std::optional<VehicleId> nearest_neighbor(const VehicleField& field, VehicleId from, double range,
                                          Excluded&& excluded) {
  detail::require(from < field.size(), ErrorKind::invalid_argument, "unknown vehicle id");
  detail::require(range > 0.0, ErrorKind::invalid_argument, "range must be positive");
  return field.nearest_to(field[from].position, range,
                          [&](VehicleId id) { return id == from || excluded(id); });
}

inline std::optional<VehicleId> nearest_neighbor(const VehicleField& field, VehicleId from,
                                                 double range,
                                                 std::span<const VehicleId> exclude = {}) {
  return nearest_neighbor(field, from, range, [&](VehicleId id) {
    return std::find(exclude.begin(), exclude.end(), id) != exclude.end();
  });
}

namespace detail {

inline void check_nn_args(int n, AreaIntensity intensity) {
  require(n >= 1, ErrorKind::invalid_argument, "neighbor order must be >= 1");
  require(intensity.value() > 0.0, ErrorKind::invalid_argument, "intensity must be positive");
}

}  // namespace detail

/// Density of the distance to the n-th nearest point of a planar PPP:
/// 2 (pi l)^n r^(2n-1) exp(-pi l r^2) / (n-1)!.
inline double nn_distance_pdf(int n, AreaIntensity intensity, double r) {
  detail::check_nn_args(n, intensity);
  detail::require(r >= 0.0, ErrorKind::invalid_argument, "distance must be non-negative");
  if (r == 0.0) return 0.0;
  const double pl = std::numbers::pi * intensity.value();
  const double log_f = std::log(2.0) + n * std::log(pl) + (2.0 * n - 1.0) * std::log(r) -
                       pl * r * r - std::lgamma(static_cast<double>(n));
  return std::exp(log_f);
}

/// CDF of the same law: P(n, pi l r^2) with P the regularized lower
/// incomplete gamma function.
inline double nn_distance_cdf(int n, AreaIntensity intensity, double r) {
  detail::check_nn_args(n, intensity);
  detail::require(r >= 0.0, ErrorKind::invalid_argument, "distance must be non-negative");
  return special::gamma_p(static_cast<double>(n), std::numbers::pi * intensity.value() * r * r);
}

}  // namespace ssa
