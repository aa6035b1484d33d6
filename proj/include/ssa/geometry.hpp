#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ssa/error.hpp"

namespace ssa {

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double squared_distance(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(Position a, Position b) { return std::sqrt(squared_distance(a, b)); }

/// Rectangular world [0, width] x [0, depth], in meters.
class WorldArea {
 public:
  WorldArea(double width, double depth) : width_(width), depth_(depth) {
    detail::require(std::isfinite(width) && width > 0.0 && std::isfinite(depth) && depth > 0.0,
                    ErrorKind::invalid_config, "world width and depth must be positive");
  }

  double width() const { return width_; }
  double depth() const { return depth_; }
  double area() const { return width_ * depth_; }
  Position center() const { return {0.5 * width_, 0.5 * depth_}; }

  bool contains(Position p) const {
    return p.x >= 0.0 && p.x <= width_ && p.y >= 0.0 && p.y <= depth_;
  }

  friend bool operator==(const WorldArea&, const WorldArea&) = default;

 private:
  double width_;
  double depth_;
};

/// Spatial PPP intensity in vehicles per square meter. Kept distinct from
/// GammaParams::rate, which is a time (or distance) rate.
class AreaIntensity {
 public:
  constexpr AreaIntensity() = default;
  explicit AreaIntensity(double per_square_meter) : value_(per_square_meter) {
    detail::require(std::isfinite(per_square_meter) && per_square_meter >= 0.0,
                    ErrorKind::invalid_config, "intensity must be finite and non-negative");
  }

  double value() const { return value_; }
  double expected_count(double region_area) const { return value_ * region_area; }

 private:
  double value_ = 0.0;
};

namespace detail {

// Antiderivative of sqrt(r^2 - x^2) on [-r, r].
inline double half_chord_integral(double x, double r) {
  const double xc = std::clamp(x, -r, r);
  return 0.5 * (xc * std::sqrt(std::max(0.0, r * r - xc * xc)) + r * r * std::asin(xc / r));
}

}  // namespace detail

/// Exact area of the disk (center, radius) intersected with the
/// axis-aligned rectangle [x0, x1] x [y0, y1].
///
/// Integrates the vertical extent min(y1, s(x)) - max(y0, -s(x)) with
/// s(x) = sqrt(r^2 - x^2). Breakpoints are placed wherever s(x) equals |y0|
/// or |y1|, so on each piece both the active bounds and the sign of the
/// extent are fixed and the integral has a closed form.
inline double disk_rectangle_area(Position center, double radius, double x0, double x1, double y0,
                                  double y1) {
  if (radius <= 0.0) return 0.0;
  // Shift so the disk is centered at the origin.
  x0 -= center.x;
  x1 -= center.x;
  y0 -= center.y;
  y1 -= center.y;
  const double r = radius;
  const double lo = std::max(x0, -r);
  const double hi = std::min(x1, r);
  if (lo >= hi || y0 >= y1) return 0.0;

  std::vector<double> cuts{lo, hi};
  for (double level : {std::abs(y0), std::abs(y1)}) {
    if (level < r) {
      const double xs = std::sqrt(r * r - level * level);
      for (double c : {-xs, xs}) {
        if (c > lo && c < hi) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const double s = std::sqrt(std::max(0.0, r * r - mid * mid));
    const bool top_is_arc = s < y1;
    const bool bottom_is_arc = -s > y0;
    const double top = top_is_arc ? s : y1;
    const double bottom = bottom_is_arc ? -s : y0;
    if (top <= bottom) continue;
    const double arc = detail::half_chord_integral(b, r) - detail::half_chord_integral(a, r);
    const double top_part = top_is_arc ? arc : y1 * (b - a);
    const double bottom_part = bottom_is_arc ? -arc : y0 * (b - a);
    total += top_part - bottom_part;
  }
  return total;
}

/// Area of the disk clipped to the world.
inline double clipped_disk_area(const WorldArea& world, Position center, double radius) {
  return disk_rectangle_area(center, radius, 0.0, world.width(), 0.0, world.depth());
}

/// Thinning ratio rho = |disk ∩ world| / |world|.
inline double disk_area_fraction(const WorldArea& world, Position center, double radius) {
  return clipped_disk_area(world, center, radius) / world.area();
}

inline double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

}  // namespace ssa
