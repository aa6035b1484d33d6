#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ssa/stats.hpp"

namespace ssa {
namespace {

EmpiricalDist gamma_draws(const GammaParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = gamma_sample(p, rng);
  return EmpiricalDist(std::move(x), "ms");
}

TEST(EmpiricalDist, SortsAndValidates) {
  const EmpiricalDist d({3, 1, 2}, "ms");
  EXPECT_EQ(d.samples(), (std::vector<double>{1, 2, 3}));
  EXPECT_THROW(EmpiricalDist({1, -2}, "ms"), Error);
  EXPECT_THROW(EmpiricalDist({1, NAN}, "ms"), Error);
  EXPECT_THROW(EmpiricalDist({}, "ms").mean(), Error);
}

TEST(EmpiricalCdf, StepFunction) {
  const EmpiricalDist d({1, 2, 3, 4}, "ms");
  EXPECT_EQ(empirical_cdf(d, 0.5), 0.0);
  EXPECT_EQ(empirical_cdf(d, 2.0), 0.5);
  EXPECT_EQ(empirical_cdf(d, 2.5), 0.5);
  EXPECT_EQ(empirical_cdf(d, 4.0), 1.0);
  EXPECT_EQ(empirical_cdf(d, 1e9), 1.0);
  EXPECT_THROW(empirical_cdf(EmpiricalDist({}, "ms"), 1.0), Error);
}

TEST(EmpiricalCdf, MonotoneAndBounded) {
  const auto d = gamma_draws(GammaParams(2, 0.1), 5000, 3);
  double prev = 0.0;
  for (int i = -10; i < 400; ++i) {
    const double f = empirical_cdf(d, i * 0.25);
    EXPECT_GE(f, prev);
    EXPECT_LE(f, 1.0);
    prev = f;
  }
}

TEST(EmpiricalDist, QuantileInvertsCdf) {
  const EmpiricalDist d({1, 2, 3, 4}, "ms");
  EXPECT_EQ(d.quantile(0.5), 2.0);
  EXPECT_EQ(d.quantile(0.0), 1.0);
  EXPECT_EQ(d.quantile(1.0), 4.0);
  EXPECT_EQ(d.quantile(0.51), 3.0);
  for (double q : {0.1, 0.25, 0.75, 0.9}) EXPECT_GE(empirical_cdf(d, d.quantile(q)), q);
}

TEST(Histogram, SingleSample) {
  const auto h = histogram(EmpiricalDist({5.0}, "ms"), 10);
  std::size_t occupied = 0;
  for (auto c : h.counts) occupied += c > 0;
  EXPECT_EQ(occupied, 1u);
  EXPECT_EQ(h.counts.back(), 1u);
}

TEST(Histogram, DensitiesIntegrateToOne) {
  const auto h = histogram(gamma_draws(GammaParams(4, 1.0 / 50), 20000, 4), 37);
  double mass = 0;
  for (double d : h.densities) mass += d * h.width();
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(h.edges.front(), 0.0);
}

TEST(Histogram, UniformDataIsFlat) {
  Rng rng(1);
  std::vector<double> x(100000);
  for (auto& v : x) v = rng.uniform(0, 10);
  x.push_back(10.0);
  const auto h = histogram(EmpiricalDist(std::move(x), "ms"), 20);
  const double expect = 100001.0 / 20;
  for (auto c : h.counts) EXPECT_NEAR(static_cast<double>(c), expect, 3 * std::sqrt(expect));
}

TEST(Histogram, FourHopPeakNearMode) {
  const auto h = histogram(gamma_draws(GammaParams(4, 1.0 / 50), 1'000'000, 6), 60);
  const auto peak = std::max_element(h.densities.begin(), h.densities.end()) - h.densities.begin();
  const double mid = 0.5 * (h.edges[peak] + h.edges[peak + 1]);
  EXPECT_NEAR(mid, 150.0, 2 * h.width());
}

TEST(KsTest, AcceptsOwnLawMostOfTheTime) {
  const GammaParams law(4, 1.0 / 50);
  int accepted = 0;
  for (std::uint64_t s = 0; s < 100; ++s) accepted += gamma_draws(law, 100000, 100 + s).size() &&
                                                       ks_test(gamma_draws(law, 100000, 100 + s), law).p_value > 0.01;
  EXPECT_GE(accepted, 98);
}

TEST(KsTest, RejectsShiftedRate) {
  const auto d = gamma_draws(GammaParams(4, 1.0 / 50), 100000, 7);
  EXPECT_TRUE(ks_test(d, GammaParams(4, 3.0 / 50)).reject_at_01);
}

TEST(KsTest, NeedsTenSamples) {
  EXPECT_THROW(ks_test(EmpiricalDist({1, 2, 3, 4, 5}, "ms"), GammaParams(1, 1)), Error);
}

TEST(KsTest, StatisticMatchesDirectSupremum) {
  const auto d = gamma_draws(GammaParams(2, 1), 500, 8);
  const GammaParams law(2, 1.1);
  double sup = 0;
  const auto& s = d.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = gamma_cdf(law, s[i]);
    sup = std::max(sup, std::abs(static_cast<double>(i + 1) / s.size() - f));
    sup = std::max(sup, std::abs(f - static_cast<double>(i) / s.size()));
  }
  EXPECT_DOUBLE_EQ(ks_test(d, law).statistic, sup);
}

TEST(KsTest, UsesOnlySortedValues) {
  auto a = gamma_draws(GammaParams(3, 2), 1000, 9).samples();
  auto b = a;
  std::reverse(b.begin(), b.end());
  const GammaParams law(3, 2);
  EXPECT_EQ(ks_test(EmpiricalDist(a, "s"), law).statistic, ks_test(EmpiricalDist(b, "s"), law).statistic);
}

TEST(KolmogorovSurvival, KnownQuantiles) {
  // Standard asymptotic critical values.
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.2238), 0.10, 1e-4);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  // Both series agree where they switch.
  EXPECT_NEAR(kolmogorov_survival(1.1799999), kolmogorov_survival(1.18), 1e-6);
}

TEST(ChiSquarePoisson, AcceptsPoissonCounts) {
  Rng rng(10);
  std::vector<std::uint64_t> counts(10000);
  for (auto& c : counts) c = rng.poisson(10.0);
  const auto r = chi_square_poisson(counts, 10.0);
  EXPECT_GT(r.p_value, 0.01);
  EXPECT_GE(r.dof, 5u);
}

TEST(ChiSquarePoisson, RejectsConstantCounts) {
  std::vector<std::uint64_t> counts(10000, 10);
  EXPECT_TRUE(chi_square_poisson(counts, 10.0).reject_at_01);
}

TEST(ChiSquarePoisson, RejectsWrongMean) {
  Rng rng(11);
  std::vector<std::uint64_t> counts(10000);
  for (auto& c : counts) c = rng.poisson(10.0);
  EXPECT_TRUE(chi_square_poisson(counts, 11.0).reject_at_01);
}

TEST(ChiSquarePoisson, EmptyInputIsAnError) {
  EXPECT_THROW(chi_square_poisson({}, 3.0), Error);
}

TEST(ChiSquarePoisson, SparseMeanStillPools) {
  Rng rng(12);
  std::vector<std::uint64_t> counts(5000);
  for (auto& c : counts) c = rng.poisson(0.3);
  const auto r = chi_square_poisson(counts, 0.3);
  EXPECT_GE(r.dof, 1u);
  EXPECT_GT(r.p_value, 0.01);
}

TEST(FitGammaMoments, RecoversFourHopParameters) {
  const auto fit = fit_gamma_moments(gamma_draws(GammaParams(4, 0.02), 1'000'000, 13));
  EXPECT_NEAR(fit.shape, 4.0, 0.05);
  EXPECT_NEAR(fit.rate, 0.02, 0.0003);
}

TEST(FitGammaMoments, ExponentialDataHasUnitShape) {
  EXPECT_NEAR(fit_gamma_moments(gamma_draws(GammaParams(1, 5), 200000, 14)).shape, 1.0, 0.02);
}

TEST(FitGammaMoments, ConstantDataIsDegenerate) {
  EXPECT_THROW(fit_gamma_moments(EmpiricalDist({3, 3, 3, 3}, "ms")), Error);
  EXPECT_THROW(fit_gamma_moments(EmpiricalDist({3}, "ms")), Error);
}

TEST(SamplesCsv, RoundTripsWithUnit) {
  const auto d = gamma_draws(GammaParams(2, 0.5), 200, 15);
  std::stringstream io;
  write_samples_csv(io, d);
  EXPECT_EQ(io.str().substr(0, 11), "latency_ms\n");
  const auto back = read_samples_csv(io);
  EXPECT_EQ(back.unit(), "ms");
  EXPECT_EQ(back.samples(), d.samples());
}

TEST(SamplesCsv, RejectsGarbage) {
  std::stringstream io("latency_ms\n1.5\nabc\n");
  EXPECT_THROW(read_samples_csv(io), Error);
}

}  // namespace
}  // namespace ssa
