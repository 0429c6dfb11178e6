#include <gtest/gtest.h>

#include <numbers>

#include "qcgauge/elementary_maps.hpp"
#include "qcgauge/random.hpp"

using namespace qcgauge;

namespace {
RadialStretch half_power() { return {{}, LogScale::one(), 0.5}; }
}  // namespace

TEST(ElementaryMaps, RadialStretchValue) {
  ComplexPoint w = eval(half_power(), {0.25, 0.0});
  EXPECT_NEAR(w.real(), 0.5, 1e-15);
  EXPECT_NEAR(w.imag(), 0.0, 1e-15);
}

TEST(ElementaryMaps, IdentityOnOuterCircle) {
  ComplexPoint z = std::polar(1.0, 0.7);
  EXPECT_NEAR(std::abs(eval(half_power(), z) - z), 0.0, 1e-15);
  SpiralStretch s = SpiralStretch::from_alpha_gamma({}, LogScale::one(), 0.5, 1.0);
  EXPECT_NEAR(std::abs(eval(s, z) - z), 0.0, 1e-15);
}

TEST(ElementaryMaps, SpiralArgumentChange) {
  SpiralStretch s = SpiralStretch::from_alpha_gamma({}, LogScale::one(), 0.5, 1.0);
  double r = std::exp(-2.0);
  EXPECT_NEAR(std::arg(eval(s, {r, 0.0})), -1.0, 1e-14);
}

TEST(ElementaryMaps, RadialBeltrami) {
  Complex mu = beltrami(half_power(), {0.5, 0.0});
  EXPECT_NEAR(mu.real(), -1.0 / 3.0, 1e-14);
  EXPECT_NEAR(mu.imag(), 0.0, 1e-14);
  EXPECT_EQ(beltrami(Similarity{LogScale::from_value(2.0), 0.3, {}, {}}, {0.1, 0.2}), Complex(0.0));
}

TEST(ElementaryMaps, SpiralBeltramiModulus) {
  SpiralStretch s({}, LogScale::one(), Complex(0.5, 0.5));
  for (double r : {0.9, 0.3, 1e-5})
    EXPECT_NEAR(std::abs(beltrami(s, std::polar(r, 1.1))), 0.44721359549995794, 1e-12);
  EXPECT_NEAR(declared_distortion(s), distortion_from_mu(0.44721359549995794), 1e-12);
}

TEST(ElementaryMaps, Inverse) {
  ComplexPoint z = inverse_eval(half_power(), {0.5, 0.0});
  EXPECT_NEAR(z.real(), 0.25, 1e-15);
  EXPECT_EQ(inverse_eval(Identity{}, {0.3, 0.4}), ComplexPoint(0.3, 0.4));
}

TEST(ElementaryMaps, RoundTripOnAnnulus) {
  SpiralStretch s({0.1, -0.2}, LogScale::from_value(0.5), Complex(0.7, 0.2));
  Rng rng(3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    ComplexPoint z = ComplexPoint(0.1, -0.2) + std::polar(rng.uniform(0.01, 0.5), rng.uniform(0.0, 6.3));
    worst = std::max(worst, std::abs(inverse_eval(s, eval(s, z)) - z));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(ElementaryMaps, FiniteDifferenceMatchesAnalytic) {
  auto f = [](ComplexPoint z) { return eval(half_power(), z); };
  Complex fd = finite_difference_beltrami(f, {0.5, 0.0}, 1e-5);
  EXPECT_NEAR(std::abs(fd - beltrami(half_power(), {0.5, 0.0})), 0.0, 1e-6);
  auto id = [](ComplexPoint z) { return z; };
  EXPECT_NEAR(std::abs(finite_difference_beltrami(id, {0.2, 0.1}, 1e-5)), 0.0, 1e-10);
}

TEST(ElementaryMaps, AnnularStretchIsContinuous) {
  AnnularStretch a({0.0, 0.0}, std::log(0.5), std::log(0.1), Complex(0.5, 0.2));
  for (double eps : {1e-12, -1e-12}) {
    ComplexPoint in = std::polar(0.1 * (1.0 + eps), 0.4);
    ComplexPoint out = std::polar(0.5 * (1.0 + eps), 0.4);
    EXPECT_NEAR(std::abs(a.eval(in) - a.eval(std::polar(0.1, 0.4))), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(a.eval(out) - std::polar(0.5, 0.4)), 0.0, 1e-10);
  }
  ComplexPoint z = std::polar(0.05, 1.0);
  EXPECT_NEAR(std::abs(a.inverse_eval(a.eval(z)) - z), 0.0, 1e-14);
}

TEST(ElementaryMaps, MuBound) {
  EXPECT_NEAR(mu_bound(2.0), 1.0 / 3.0, 1e-16);
  EXPECT_NEAR(distortion_from_mu(1.0 / 3.0), 2.0, 1e-15);
}
