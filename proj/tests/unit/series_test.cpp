#include <gtest/gtest.h>

#include <numbers>

#include "qcgauge/random.hpp"
#include "qcgauge/series.hpp"

using namespace qcgauge;

namespace {

std::vector<ComplexPoint> random_lambdas(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ComplexPoint> out;
  while (static_cast<int>(out.size()) < n) {
    ComplexPoint z(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (std::abs(z) < 0.9) out.push_back(z);
  }
  return out;
}

double ratio(Complex z, double K) {
  double rho = std::abs(z);
  return std::abs(SeriesMap::bracket(z, 1.0 / K - 1.0)) / std::min(rho, std::pow(rho, 1.0 / K));
}

}  // namespace

TEST(Series, SingleTermClosedForm) {
  SeriesMap m(2.0, {{0.0, 0.0}});
  auto v = series_eval(m, {0.01, 0.0}, 1e-8);
  EXPECT_NEAR(v.value.real(), 0.05, 1e-15);
  EXPECT_EQ(v.terms, 1);
  auto far = series_eval(m, {1.5, 0.5}, 1e-8);
  EXPECT_NEAR(std::abs(far.value - ComplexPoint(0.75, 0.25)), 0.0, 1e-15);
}

TEST(Series, TailCertificate) {
  EXPECT_EQ(series_truncation(100, 1e-8), 29);
  EXPECT_EQ(series_truncation(10, 1e-8), 10);
  EXPECT_THROW(series_truncation(10, 0.0), std::invalid_argument);
}

TEST(Series, RejectsLambdaOutsideDisk) {
  EXPECT_THROW(SeriesMap(2.0, {{1.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(SeriesMap(1.0, {{0.0, 0.0}}), std::invalid_argument);
}

TEST(Series, IncrementMatchesDirectDifference) {
  SeriesMap m(2.0, random_lambdas(5, 3));
  ComplexPoint z0(0.1, 0.2);
  Complex d(1e-3, 2e-3);
  Complex direct = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    direct += std::ldexp(1.0, -static_cast<int>(i) - 1) * (m.term(i, z0 + d) - m.term(i, z0));
  EXPECT_NEAR(std::abs(series_increment(m, z0, d) - direct), 0.0, 1e-14);
}

TEST(Series, SinglePointExponent) {
  SeriesMap m(2.0, {{0.0, 0.0}});
  std::vector<LogScale> scales;
  for (int i = 1; i <= 20; ++i) scales.push_back(LogScale::from_log(-i * std::numbers::ln2));
  auto rep = stretching_at_lambda(m, 1, scales, stretching_estimate_constant(2.0));
  for (const auto& s : rep.trace.samples) EXPECT_NEAR(s.log_increment - 0.5 * s.scale.log_value(), std::log(0.5), 1e-12);
  EXPECT_NEAR(rep.slope, 0.5, 1e-12);
  EXPECT_NEAR(rep.constant, 0.5, 1e-12);
  EXPECT_EQ(rep.flagged, 0);
}

TEST(Series, TwoPointExponent) {
  SeriesMap m(2.0, {{0.0, 0.0}, {0.5, 0.0}});
  double C0 = stretching_estimate_constant(2.0);
  std::vector<LogScale> scales;
  for (int i = 0; i <= 20; ++i) scales.push_back(LogScale::from_log(std::log(1e-3) - i * std::log(10.0) * 5.0 / 20.0));
  auto rep = stretching_at_lambda(m, 1, scales, C0);
  EXPECT_NEAR(rep.slope, 0.5, 0.01);
  EXPECT_GE(rep.constant, 0.5 * (1.0 - 0.5 * C0));
  EXPECT_LE(rep.constant, 0.5 * (1.0 + 0.5 * C0));
}

TEST(Series, RandomSetTenthPoint) {
  SeriesMap m(2.0, random_lambdas(50, 17));
  double C0 = stretching_estimate_constant(2.0);
  auto rep = stretching_at_lambda(m, 10, series_default_scales(m, 10, C0), C0);
  EXPECT_EQ(rep.flagged, 0);
  EXPECT_NEAR(rep.slope, 0.5, 0.02);
}

TEST(Series, StretchingRatioLimits) {
  EXPECT_NEAR(ratio({-1.0, 0.0}, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(ratio({1e-9, 0.0}, 2.0), 0.5, 1e-8);
  EXPECT_NEAR(ratio({1e12, 0.0}, 2.0), 1.0, 1e-5);
}

TEST(Series, EstimateConstantOracle) {
  double c = stretching_estimate_constant(2.0);
  EXPECT_NEAR(c, 1.4141909127, 1e-8);
  double fine = stretching_estimate_constant(2.0, {1920, 128, 1e-8, 1e4});
  EXPECT_NEAR(fine, 1.4142053050, 1e-8);
  EXPECT_LT(std::abs(fine - c) / c, 0.01);
}

TEST(Series, FarNearSplit) {
  SeriesMap m(2.0, {{0.0, 0.0}, {0.5, 0.0}, {0.001, 0.0}});
  double C0 = stretching_estimate_constant(2.0);
  auto split = series_far_near(m, 1, 1e-4, C0);
  EXPECT_GT(split.far, 0.0);
  EXPECT_GT(split.near, 0.0);
}
