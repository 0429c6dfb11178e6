#include <gtest/gtest.h>

#include <numbers>

#include "qcgauge/exponents.hpp"
#include "qcgauge/measure.hpp"

using namespace qcgauge;

namespace {

BuildOptions loose() {
  BuildOptions o;
  o.sigma_cap = 0.95;
  return o;
}

std::vector<LogScale> dyadic(int n) {
  std::vector<LogScale> s;
  for (int i = 1; i <= n; ++i) s.push_back(LogScale::from_log(-2.0 * i));
  return s;
}

const StretchRotationParams kStretch(2.0, 0.75, 0.0);

}  // namespace

TEST(Exponents, GlobalSpiral) {
  Complex lambda(0.5, 0.5);
  auto f = [lambda](ComplexPoint z) { return z == ComplexPoint{} ? z : z * std::pow(std::abs(z), lambda - 1.0); };
  auto st = stretch_trace(f, {}, dyadic(10));
  for (const auto& s : st.samples) EXPECT_NEAR(s.value, 0.5, 1e-12);
  auto rt = rotation_trace(f, {}, dyadic(10), 64);
  for (const auto& s : rt.samples) {
    EXPECT_NEAR(s.cumulative_arg, 0.5 * s.scale.log_value(), 1e-9);
    EXPECT_NEAR(s.value, 1.0, 1e-9);
  }
}

TEST(Exponents, Identity) {
  auto f = [](ComplexPoint z) { return z; };
  auto st = stretch_trace(f, {0.2, 0.1}, dyadic(5));
  for (const auto& s : st.samples) EXPECT_NEAR(s.value, 1.0, 1e-9);
  auto rt = rotation_trace(f, {0.2, 0.1}, dyadic(5), 64);
  for (const auto& s : rt.samples) {
    EXPECT_NEAR(s.cumulative_arg, 0.0, 1e-12);
    EXPECT_NEAR(s.value, 0.0, 1e-12);
  }
}

TEST(Exponents, RejectsIncreasingScales) {
  auto f = [](ComplexPoint z) { return z; };
  std::vector<LogScale> bad{LogScale::from_log(-3.0), LogScale::from_log(-1.0)};
  EXPECT_THROW(stretch_trace(f, {}, bad), std::invalid_argument);
}

TEST(Exponents, RegressionSlope) {
  EXPECT_NEAR(regression_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0, 1e-15);
}

TEST(Exponents, StructureStretchAtBlockCenter) {
  auto st = build_gauged_stretch(kStretch, Gauge::constant(1.0), ScheduleSpec::saturated(0.1, 3), 5, 7, loose());
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    auto path = st.random_path(5, rng);
    BlockProbe probe(st, path);
    auto tr = stretch_trace(probe, st.centers(path).first, probe.branch_scales());
    EXPECT_NEAR(tr.fitted_limit, 0.75, 0.05);
    EXPECT_NEAR(tr.samples.back().log_increment, st.classes[st.class_of(path)].log_t, 1e-9);
  }
}

TEST(Exponents, StructureRotationAtBlockCenter) {
  StretchRotationParams p(2.0, 0.8, 0.1);
  auto st = build_gauged_rotation(p, Gauge::constant(p.dimension()), ScheduleSpec::saturated(0.1, 3), 5, 3, loose());
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    auto path = st.random_path(5, rng);
    BlockProbe probe(st, path);
    auto tr = rotation_trace(probe, st.centers(path).first, probe.branch_scales());
    EXPECT_NEAR(tr.fitted_limit, 0.1, 0.05);
    EXPECT_LE(std::abs(tr.samples.back().cumulative_arg - probe.level(5).rotation), 10.0 + 2.0 * 5);
  }
}

TEST(Exponents, OffCenterProbeAgrees) {
  auto st = build_gauged_stretch(kStretch, Gauge::constant(1.0), ScheduleSpec::saturated(0.1, 3), 5, 7, loose());
  Rng rng(3);
  auto path = st.random_path(5, rng);
  BlockProbe center(st, path), off(st, path, {0.3, -0.2});
  auto a = stretch_trace(center, {}, center.branch_scales());
  auto b = stretch_trace(off, {}, off.branch_scales());
  EXPECT_NEAR(a.fitted_limit, b.fitted_limit, 0.05);
}

TEST(Measure, MismatchedGaugeDrifts) {
  auto st = build_gauged_stretch(kStretch, Gauge::log_power(1.0, 1.0), ScheduleSpec::saturated(0.1, 3), 4, 3, loose());
  Gauge wrong = Gauge::log_power(1.0, 2.0);
  double previous = 1.0;
  for (int k = 1; k <= 4; ++k) {
    double q = gauged_premeasure(st, wrong, k) / st.coverage_product(k);
    EXPECT_LT(q, previous);
    previous = q;
  }
}

TEST(Measure, CarlesonClosedCases) {
  auto st = build_gauged_stretch(kStretch, Gauge::constant(1.0), ScheduleSpec::saturated(0.1, 3), 3, 2, loose());
  Disk unit{{}, LogScale::one()};
  EXPECT_NEAR(carleson_ratio(st, *st.gauge, unit), st.coverage_product(1), 1e-12);
  Disk away{{0.0, 0.0}, LogScale::from_value(0.5)};
  away.center = {5.0, 0.0};
  EXPECT_EQ(carleson_ratio(st, *st.gauge, away), 0.0);
  EXPECT_THROW(carleson_check(st, *st.gauge, 10, 1), std::invalid_argument);
}

TEST(Measure, WolffBandClosedForm) {
  auto nu = [](double lr) { return std::numbers::pi * std::exp(2.0 * lr); };
  EXPECT_NEAR(wolff_band(nu, 2.0, 1.0, std::log(1e-3), 0.0, 32), 21.701353237246394, 1e-10);
}

TEST(Measure, WolffSeries) {
  auto r = RieszParams::from_dimension(1.0, 2.0, 2.0);
  EXPECT_NEAR(wolff_comparison_series(r, 1.0, 2.0, 5), 0.18566203703703704, 1e-15);
  EXPECT_NEAR(wolff_comparison_series(r, 1.0, 2.0, 200000), 0.20205690315959429, 1e-10);
}

TEST(Measure, WolffMonotoneInCutAndDelta) {
  auto r = RieszParams::from_dimension(1.0, 2.0, 2.0);
  auto fast = r;
  fast.delta *= 2.0;
  ScheduleSpec s;
  s.generations = {{Family::of(20, 0.01)}};
  auto a = build_riesz_capacity(kStretch, r, s, 3, 4, loose());
  auto b = build_riesz_capacity(kStretch, fast, s, 3, 4, loose());
  ASSERT_EQ(a.schedule[0].halvings, b.schedule[0].halvings);
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    auto path = a.random_path(3, rng);
    double previous = 0.0;
    for (int cut = 1; cut <= 3; ++cut) {
      double v = wolff_potential(a, r, a.centers(path).first, cut).value;
      EXPECT_GE(v, previous);
      previous = v;
    }
    EXPECT_LT(wolff_potential(b, fast, b.centers(path).first, 3).value, previous);
  }
}

TEST(Measure, ImagePremeasureBalance) {
  auto st = build_gauged_stretch(kStretch, Gauge::constant(1.0), ScheduleSpec::saturated(0.1, 3), 5, 5, loose());
  double d = st.dimension, alpha = st.params.alpha;
  auto balanced = image_premeasure_sequence(st, image_gauge(*st.gauge, 2.0, d / alpha));
  auto high = image_premeasure_sequence(st, image_gauge(*st.gauge, 2.0, d / alpha + 0.1));
  auto low = image_premeasure_sequence(st, image_gauge(*st.gauge, 2.0, d / alpha - 0.1));
  for (double v : balanced) {
    EXPECT_GT(v, 0.05);
    EXPECT_LT(v, 20.0);
  }
  for (int k = 1; k < 5; ++k) {
    EXPECT_LT(high[k], high[k - 1]);
    EXPECT_GT(low[k], low[k - 1]);
  }
}
