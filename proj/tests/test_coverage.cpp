#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ssa/coverage.hpp"

namespace ssa {
namespace {

constexpr double kPi = std::numbers::pi;

const TargetDisk kTarget{{0.0, 0.0}, 50.0};

// Deterministic grid estimate of the covered fraction of a disk. Shares no
// code with the Monte Carlo path beyond SightArc::contains.
double grid_coverage(const std::vector<SightArc>& arcs, const TargetDisk& t, int n = 1500) {
  const double h = 2.0 * t.radius / n;
  long inside = 0, covered = 0;
  for (int i = 0; i < n; ++i) {
    const double x = t.center.x - t.radius + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = t.center.y - t.radius + (j + 0.5) * h;
      if ((x - t.center.x) * (x - t.center.x) + (y - t.center.y) * (y - t.center.y) > t.radius * t.radius) continue;
      ++inside;
      for (const auto& a : arcs) {
        if (a.contains({x, y})) {
          ++covered;
          break;
        }
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(inside);
}

SightArc random_arc(Rng& rng) {
  SightArc a;
  a.apex = {rng.uniform(-120, 120), rng.uniform(-120, 120)};
  a.heading = rng.uniform(0, 2 * kPi);
  a.half_angle = rng.uniform(kPi / 12, kPi / 3);
  a.radius = rng.uniform(40, 100);
  return a;
}

// Independent minimum cover: enumerate masks directly and keep the
// smallest qualifying subset, lexicographically first among equals.
std::optional<std::vector<std::size_t>> brute_min_cover(const std::vector<SightArc>& arcs,
                                                        const TargetDisk& t, double threshold,
                                                        std::size_t points, std::uint64_t seed) {
  const auto pts = sample_disk_points(t, points, seed);
  std::optional<std::vector<std::size_t>> best;
  const std::size_t n = arcs.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) chosen.push_back(i);
    }
    if (best && chosen.size() > best->size()) continue;
    std::size_t covered = 0;
    for (const auto& p : pts) {
      for (std::size_t i : chosen) {
        if (arcs[i].contains(p)) {
          ++covered;
          break;
        }
      }
    }
    if (static_cast<double>(covered) / static_cast<double>(pts.size()) < threshold) continue;
    if (!best || chosen.size() < best->size() || chosen < *best) best = chosen;
  }
  return best;
}

TEST(SightArc, ContainsHandlesAngleWrap) {
  const SightArc a{{0, 0}, 0.0, kPi / 6, 10.0};
  EXPECT_TRUE(a.contains({5, 0}));
  EXPECT_TRUE(a.contains({5, -1}));   // just below the heading, across 0 / 2pi
  EXPECT_FALSE(a.contains({-5, 0}));
  EXPECT_FALSE(a.contains({11, 0}));
  EXPECT_TRUE(a.contains({0, 0}));
  const SightArc b{{0, 0}, 2 * kPi - 0.01, 0.1, 10.0};
  EXPECT_TRUE(b.contains({5, 0.2}));
}

TEST(SightArc, ValidateRejectsBadShapes) {
  EXPECT_THROW((SightArc{{0, 0}, 0.0, 0.0, 1.0}.validate()), Error);
  EXPECT_THROW((SightArc{{0, 0}, 0.0, 4.0, 1.0}.validate()), Error);
  EXPECT_THROW((SightArc{{0, 0}, 0.0, 1.0, -1.0}.validate()), Error);
}

TEST(CoverageRate, FullContainmentIsOne) {
  const std::vector<SightArc> arcs{{{0, 0}, 0.0, kPi, 60.0}};
  const auto est = coverage_rate(arcs, kTarget, 100000, 3);
  EXPECT_EQ(est.rate, 1.0);
  EXPECT_EQ(est.sample_points, 100000u);
}

TEST(CoverageRate, DisjointArcsGiveExactlyZero) {
  const std::vector<SightArc> arcs{{{200, 0}, 0.0, kPi / 4, 80.0}, {{0, -100}, 3 * kPi / 2, kPi / 3, 40.0}};
  EXPECT_EQ(coverage_rate(arcs, kTarget, 10000, 4).rate, 0.0);
  EXPECT_EQ(coverage_rate({}, kTarget, 10000, 4).rate, 0.0);
}

TEST(CoverageRate, RejectsTooFewSamples) {
  EXPECT_THROW(coverage_rate({}, kTarget, 999, 1), Error);
}

TEST(CoverageRate, SameSeedSameEstimate) {
  Rng rng(5);
  std::vector<SightArc> arcs{random_arc(rng), random_arc(rng), random_arc(rng)};
  EXPECT_EQ(coverage_rate(arcs, kTarget, 5000, 9).rate, coverage_rate(arcs, kTarget, 5000, 9).rate);
}

TEST(CoverageRate, ThreeSectorScenarioMatchesGridOracle) {
  // Three vehicles around a 75 m target, looking inward.
  const TargetDisk target{{0, 0}, 75.0};
  const std::vector<SightArc> arcs{
      {{-90, 0}, 0.0, kPi / 5, 120.0},
      {{60, 60}, 5 * kPi / 4, kPi / 6, 110.0},
      {{30, -80}, kPi / 2, kPi / 4, 90.0},
  };
  const auto est = coverage_rate(arcs, target, 200000, 21);
  const double oracle = grid_coverage(arcs, target);
  EXPECT_GT(oracle, 0.1);
  EXPECT_LT(oracle, 0.95);
  EXPECT_NEAR(est.rate, oracle, 3 * est.std_err + 1e-3);
}

TEST(CoverageRate, HalfPlaneSectorIsHalf) {
  // A half-disk sector centered on the target covers exactly half of it.
  const std::vector<SightArc> arcs{{{0, 0}, kPi / 2, kPi / 2, 50.0}};
  const auto est = coverage_rate(arcs, kTarget, 200000, 22);
  EXPECT_NEAR(est.rate, 0.5, 3 * est.std_err);
}

TEST(CoverageRate, MonotoneInArcSetAndBoundedByUnionBound) {
  Rng rng(6);
  for (int s = 0; s < 30; ++s) {
    std::vector<SightArc> arcs;
    double prev = 0.0, sum_single = 0.0;
    for (int k = 0; k < 6; ++k) {
      arcs.push_back(random_arc(rng));
      const double r = coverage_rate(arcs, kTarget, 4000, 100 + s).rate;
      EXPECT_GE(r, prev);
      sum_single += coverage_rate(std::span(&arcs.back(), 1), kTarget, 4000, 100 + s).rate;
      EXPECT_LE(r, sum_single + 1e-12);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
      prev = r;
    }
  }
}

TEST(CoverageAccumulator, IncrementalMatchesBatch) {
  Rng rng(7);
  std::vector<SightArc> arcs;
  for (int i = 0; i < 8; ++i) arcs.push_back(random_arc(rng));
  CoverageAccumulator acc(kTarget, 5000, 77);
  for (const auto& a : arcs) acc.add(a);
  EXPECT_EQ(acc.rate(), coverage_rate(arcs, kTarget, 5000, 77).rate);
}

TEST(AccumulateVision, FlattensInOrder) {
  const SightArc a{{1, 0}, 0, 1, 10}, b{{2, 0}, 0, 1, 10}, c{{3, 0}, 0, 1, 10};
  const std::vector<std::vector<SightArc>> steps{{a}, {}, {b, c}};
  const auto flat = accumulate_vision(steps);
  ASSERT_EQ(flat.size(), 3u);
  EXPECT_EQ(flat[0].apex.x, 1);
  EXPECT_EQ(flat[2].apex.x, 3);
  EXPECT_TRUE(accumulate_vision(std::span<const std::vector<SightArc>>{}).empty());
}

TEST(AccumulateVision, RepeatedStepDoesNotChangeCoverage) {
  Rng rng(8);
  std::vector<SightArc> step{random_arc(rng), random_arc(rng)};
  const std::vector<std::vector<SightArc>> once{step}, twice{step, step};
  EXPECT_EQ(coverage_rate(accumulate_vision(once), kTarget, 5000, 1).rate,
            coverage_rate(accumulate_vision(twice), kTarget, 5000, 1).rate);
}

TEST(AccumulateVision, CumulativeRateNondecreasingOverTime) {
  Rng rng(9);
  std::vector<std::vector<SightArc>> steps;
  double prev = 0.0;
  for (int t = 0; t < 10; ++t) {
    steps.push_back({random_arc(rng), random_arc(rng)});
    const double r = coverage_rate(accumulate_vision(steps), kTarget, 5000, 2).rate;
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(MinCoverSubset, ZeroThresholdIsEmptySubset) {
  Rng rng(10);
  std::vector<SightArc> arcs{random_arc(rng), random_arc(rng)};
  const auto best = min_cover_subset(arcs, kTarget, 0.0);
  ASSERT_TRUE(best.has_value());
  EXPECT_TRUE(best->indices.empty());
}

TEST(MinCoverSubset, SingleCoveringArcIsChosen) {
  std::vector<SightArc> arcs{{{300, 300}, 0, 1, 10}, {{0, 0}, 0, kPi, 60}, {{0, 0}, 0, kPi, 70}};
  const auto best = min_cover_subset(arcs, kTarget, 1.0);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->indices, std::vector<std::size_t>{1});
  EXPECT_EQ(best->estimate.rate, 1.0);
}

TEST(MinCoverSubset, NoneWhenFullSetFallsShort) {
  std::vector<SightArc> arcs{{{0, 0}, 0, kPi / 2, 60}};
  EXPECT_FALSE(min_cover_subset(arcs, kTarget, 0.9).has_value());
  EXPECT_FALSE(min_cover_subset({}, kTarget, 0.5).has_value());
}

TEST(MinCoverSubset, RejectsMoreThan22Arcs) {
  std::vector<SightArc> arcs(23, SightArc{{0, 0}, 0, 1, 10});
  try {
    min_cover_subset(arcs, kTarget, 0.5);
    FAIL() << "expected a capacity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
}

TEST(MinCoverSubset, AgreesWithMaskEnumeration) {
  Rng rng(11);
  for (int inst = 0; inst < 15; ++inst) {
    std::vector<SightArc> arcs;
    for (int i = 0; i < 8; ++i) {
      auto a = random_arc(rng);
      a.apex = {rng.uniform(-60, 60), rng.uniform(-60, 60)};
      a.heading = std::atan2(-a.apex.y, -a.apex.x) + rng.uniform(-0.5, 0.5);
      arcs.push_back(a);
    }
    const double full = coverage_rate(arcs, kTarget, 2000, inst).rate;
    const double threshold = 0.8 * full;
    const auto got = min_cover_subset(arcs, kTarget, threshold, 2000, inst);
    const auto want = brute_min_cover(arcs, kTarget, threshold, 2000, inst);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(got->indices, *want);
      EXPECT_GE(got->estimate.rate, threshold);
    }
  }
}

}  // namespace
}  // namespace ssa
