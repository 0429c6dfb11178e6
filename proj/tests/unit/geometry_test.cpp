#include <gtest/gtest.h>

#include <vector>

#include "qcgauge/geometry.hpp"
#include "qcgauge/root_finding.hpp"

using namespace qcgauge;

TEST(LogScale, ProductOfHalves) {
  std::vector<LogScale> f{LogScale::from_value(0.5), LogScale::from_value(0.5)};
  EXPECT_NEAR(log_scale_product(f).log_value(), std::log(0.25), 1e-15);
}

TEST(LogScale, ProductOfOne) {
  std::vector<LogScale> f{LogScale::from_value(1.0)};
  EXPECT_EQ(log_scale_product(f).log_value(), 0.0);
}

TEST(LogScale, ProductFarBelowDoubleRange) {
  std::vector<LogScale> f(100, LogScale::from_value(1e-10));
  LogScale p = log_scale_product(f);
  EXPECT_NEAR(p.log_value(), -2302.5850929940457, 1e-10);
  EXPECT_FALSE(p.representable());
  EXPECT_THROW(p.value(), RangeError);
}

TEST(LogScale, RejectsNonPositive) {
  EXPECT_THROW(LogScale::from_value(0.0), std::invalid_argument);
  EXPECT_THROW(LogScale::from_value(-1.0), std::invalid_argument);
}

TEST(LogScale, OrderingAndArithmetic) {
  LogScale a = LogScale::from_value(0.1), b = LogScale::from_value(0.01);
  EXPECT_LT(b, a);
  EXPECT_NEAR((a * a).value(), 0.01, 1e-17);
  EXPECT_NEAR((a / b).value(), 10.0, 1e-13);
  EXPECT_NEAR(a.pow(3.0).value(), 1e-3, 1e-18);
}

TEST(LogSumExp, HandlesHugeNegativeTerms) {
  std::vector<double> t{-5000.0, -5000.0};
  EXPECT_NEAR(log_sum_exp(t), -5000.0 + std::log(2.0), 1e-12);
  EXPECT_TRUE(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST(Disks, Disjointness) {
  auto one = LogScale::one();
  EXPECT_TRUE(disks_disjoint({{0, 0}, one}, {{3, 0}, one}));
  EXPECT_FALSE(disks_disjoint({{0, 0}, one}, {{1.5, 0}, one}));
  EXPECT_FALSE(disks_disjoint({{0, 0}, one}, {{2, 0}, one}));
}

TEST(Disks, Containment) {
  Disk outer{{0, 0}, LogScale::one()};
  EXPECT_TRUE(disk_contains(outer, {{0.5, 0}, LogScale::from_value(0.5)}));
  EXPECT_FALSE(disk_contains(outer, {{0.6, 0}, LogScale::from_value(0.5)}));
}

TEST(MultiIndex, DepthFirstOrder) {
  MultiIndex root;
  MultiIndex a = root.child(0, 1);
  MultiIndex ab = a.child(0, 0);
  MultiIndex b = root.child(0, 2);
  EXPECT_LT(a, ab);
  EXPECT_LT(ab, b);
  EXPECT_EQ(ab.depth(), 2);
  EXPECT_THROW(MultiIndex({{2, 0, 0}}), std::invalid_argument);
}

TEST(RootFinding, IncreasingFunction) {
  auto r = solve_increasing([](double x) { return x * x * x - 8.0; }, 0.0, 0.5, 1e-13);
  EXPECT_NEAR(r.root, 2.0, 1e-12);
}

TEST(RootFinding, BracketLimit) {
  EXPECT_THROW(solve_increasing([](double) { return -1.0; }, 0.0, 1.0, 1e-12, 100.0), BracketError);
}
