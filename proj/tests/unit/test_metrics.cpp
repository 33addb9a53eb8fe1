#include <gtest/gtest.h>

#include "blw/metrics.hpp"
#include "test_util.hpp"

using namespace blw;

TEST(Metrics, WorkedExample) {
  const Signal a({0.0, 0.0, 0.0}, 1.0);
  const Signal b({0.0, 1.0, -2.0}, 1.0);
  EXPECT_EQ(mad(a, b), 2.0);
  EXPECT_EQ(ssd(a, b), 5.0);
  EXPECT_DOUBLE_EQ(prd(a, b), 100.0);
}

TEST(Metrics, PrdUsesReferenceMeanInDenominator) {
  const Signal s1({1.0, 3.0}, 1.0);  // mean 2
  const Signal s2({2.0, 5.0}, 1.0);
  // num = 1 + 4, den = 0 + 9
  EXPECT_NEAR(prd(s1, s2), 100.0 * std::sqrt(5.0 / 9.0), 1e-12);
}

TEST(Metrics, ConstantOffsetPrd) {
  EXPECT_DOUBLE_EQ(prd(Signal({1, 1, 1, 1}, 1.0), Signal({2, 2, 2, 2}, 1.0)), 100.0);
}

TEST(Metrics, IdenticalSignals) {
  const Signal s({0.1, -0.4, 0.9, 0.2}, 250.0);
  EXPECT_EQ(mad(s, s), 0.0);
  EXPECT_EQ(ssd(s, s), 0.0);
  EXPECT_EQ(prd(s, s), 0.0);
}

TEST(Metrics, UndefinedPrd) {
  EXPECT_THROW(prd(Signal({0.0, 2.0}, 1.0), Signal({1.0, 1.0}, 1.0)), UndefinedMetricError);
}

TEST(Metrics, Mismatches) {
  EXPECT_THROW(mad(Signal({1.0, 2.0}, 1.0), Signal({1.0}, 1.0)), DimensionError);
  EXPECT_THROW(ssd(Signal({1.0}, 1.0), Signal({1.0}, 2.0)), RateError);
}

TEST(MetricsProperties, RandomPairs) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Signal a(test::white(400, seed), 100.0);
    const Signal b(test::white(400, seed + 100), 100.0);
    EXPECT_EQ(mad(a, b), mad(b, a));
    EXPECT_DOUBLE_EQ(ssd(a, b), ssd(b, a));
    EXPECT_LE(mad(a, b), std::sqrt(ssd(a, b)));
    EXPECT_GE(mad(a, b) * mad(a, b) * 400.0, ssd(a, b));

    // doubling the residual quadruples SSD and doubles MAD
    std::vector<double> far(400);
    for (std::size_t i = 0; i < 400; ++i) far[i] = a[i] + 2.0 * (b[i] - a[i]);
    const Signal c(far, 100.0);
    EXPECT_NEAR(ssd(a, c), 4.0 * ssd(a, b), 1e-9 * ssd(a, b));
    EXPECT_NEAR(mad(a, c), 2.0 * mad(a, b), 1e-12);
  }
}

TEST(SlidingCovariance, MatchesDirectComputation) {
  const Signal a(test::white(300, 4), 50.0);
  const Signal b(test::white(300, 5), 50.0);
  const auto c = sliding_covariance(a, b, 1.0);
  ASSERT_EQ(c.size(), 300u);
  for (std::size_t m : {0u, 10u, 25u, 150u, 290u, 299u}) {
    std::size_t start = m >= 25 ? m - 25 : 0;
    start = std::min<std::size_t>(start, 250);
    double ma = 0, mb = 0;
    for (std::size_t i = start; i < start + 50; ++i) {
      ma += a[i] / 50.0;
      mb += b[i] / 50.0;
    }
    double acc = 0;
    for (std::size_t i = start; i < start + 50; ++i) acc += (a[i] - ma) * (b[i] - mb);
    EXPECT_NEAR(c[m], acc / 49.0, 1e-12) << m;
  }
}

TEST(SlidingCovariance, SelfCovarianceIsVariance) {
  const auto s = test::sine(1.0, 100.0, 1000, 2.0);
  const auto c = sliding_covariance(s, s, 1.0);
  // one full period of amplitude 2: variance 2 * 100/99
  for (std::size_t m = 0; m < c.size(); ++m) EXPECT_NEAR(c[m], 2.0 * 100.0 / 99.0, 1e-9);
}

TEST(SlidingCovariance, OffsetCopyGivesSlidingVariance) {
  const Signal a(test::white(400, 9), 100.0);
  std::vector<double> shifted(a.samples().begin(), a.samples().end());
  for (double& v : shifted) v += 4.0;
  const auto c = sliding_covariance(a, Signal(shifted, 100.0), 0.5);
  const auto v = sliding_covariance(a, a, 0.5);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], v[i], 1e-12);
}

TEST(SlidingCovariance, IndependentNoiseAveragesOut) {
  const std::size_t n = 20000;
  const Signal a(test::white(n, 31), 100.0);
  const Signal b(test::white(n, 32), 100.0);
  const auto c = sliding_covariance(a, b, 1.0);
  double mean = 0.0;
  for (double v : c.samples()) mean += v;
  mean /= static_cast<double>(n);
  // windows overlap, so use the count of independent windows
  EXPECT_LE(std::abs(mean), 3.0 * 0.1 / std::sqrt(static_cast<double>(n) / 100.0));
}

TEST(SlidingCovariance, Errors) {
  const Signal s(std::vector<double>(10, 1.0), 10.0);
  EXPECT_THROW(sliding_covariance(s, s, 0.2), WindowError);
  EXPECT_THROW(sliding_covariance(s, s, 2.0), WindowError);
}
