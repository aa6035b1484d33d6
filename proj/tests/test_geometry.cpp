#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ssa/geometry.hpp"
#include "ssa/rng.hpp"

namespace ssa {
namespace {

// Midpoint-grid estimate of |disk ∩ rectangle|, independent of the
// piecewise closed form.
double grid_area(Position c, double r, double x0, double x1, double y0, double y1, int n = 2000) {
  const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
  long inside = 0;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (i + 0.5) * hx;
    for (int j = 0; j < n; ++j) {
      const double y = y0 + (j + 0.5) * hy;
      if ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) <= r * r) ++inside;
    }
  }
  return static_cast<double>(inside) * hx * hy;
}

TEST(WorldArea, RejectsNonPositiveSides) {
  EXPECT_THROW(WorldArea(0.0, 10.0), Error);
  EXPECT_THROW(WorldArea(10.0, -1.0), Error);
  EXPECT_DOUBLE_EQ(WorldArea(1000.0, 1000.0).area(), 1e6);
}

TEST(AreaIntensity, RejectsNegative) {
  EXPECT_THROW(AreaIntensity(-1e-3), Error);
  EXPECT_DOUBLE_EQ(AreaIntensity(100.0 / 1e6).expected_count(1e6), 100.0);
}

TEST(DiskRectangleArea, InteriorDiskIsFullDisk) {
  const double a = disk_rectangle_area({500, 500}, 100, 0, 1000, 0, 1000);
  EXPECT_NEAR(a, std::numbers::pi * 1e4, 1e-8);
  const WorldArea world(1000, 1000);
  EXPECT_NEAR(disk_area_fraction(world, {500, 500}, 100), 0.0314159265, 1e-9);
}

TEST(DiskRectangleArea, CornerAndEdgeCases) {
  // Quarter disk at a corner, half disk on an edge.
  EXPECT_NEAR(disk_rectangle_area({0, 0}, 10, 0, 100, 0, 100), std::numbers::pi * 100 / 4, 1e-9);
  EXPECT_NEAR(disk_rectangle_area({50, 0}, 10, 0, 100, 0, 100), std::numbers::pi * 100 / 2, 1e-9);
  // Disk containing the whole rectangle.
  EXPECT_NEAR(disk_rectangle_area({50, 50}, 1000, 0, 100, 0, 100), 1e4, 1e-6);
  // Disjoint.
  EXPECT_EQ(disk_rectangle_area({500, 500}, 10, 0, 100, 0, 100), 0.0);
  EXPECT_EQ(disk_rectangle_area({5, 5}, 0, 0, 10, 0, 10), 0.0);
}

TEST(DiskRectangleArea, MatchesGridOracleOnRandomCases) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const double x0 = rng.uniform(-50, 50), x1 = x0 + rng.uniform(1, 150);
    const double y0 = rng.uniform(-50, 50), y1 = y0 + rng.uniform(1, 150);
    const Position c{rng.uniform(-80, 180), rng.uniform(-80, 180)};
    const double r = rng.uniform(1, 120);
    const double exact = disk_rectangle_area(c, r, x0, x1, y0, y1);
    const double oracle = grid_area(c, r, x0, x1, y0, y1, 1200);
    const double cell = (x1 - x0) * (y1 - y0) / (1200.0 * 1200.0);
    // Grid error scales with boundary length times the cell diagonal.
    const double tol = 2.0 * std::numbers::pi * r * std::sqrt(cell) + 1e-9;
    EXPECT_NEAR(exact, oracle, tol) << "trial " << trial;
    EXPECT_LE(exact, std::min(std::numbers::pi * r * r, (x1 - x0) * (y1 - y0)) + 1e-9);
  }
}

TEST(WrapAngle, MapsIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(wrap_angle(-std::numbers::pi / 2), 1.5 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(wrap_angle(5 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_LT(wrap_angle(2 * std::numbers::pi), 2 * std::numbers::pi);
}

TEST(SeedDerivation, DistinctAndStable) {
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(42, 8));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

}  // namespace
}  // namespace ssa
