#include <gtest/gtest.h>

#include "qcgauge/packing.hpp"

using namespace qcgauge;

namespace {

void expect_valid(const Packing& p) {
  const auto& d = p.disks();
  for (std::size_t i = 0; i < d.size(); ++i) {
    double ri = p.radius(static_cast<int>(i));
    EXPECT_LE(std::abs(d[i].center) + ri, 1.0);
    for (std::size_t j = i + 1; j < d.size(); ++j)
      EXPECT_GT(std::abs(d[i].center - d[j].center), ri + p.radius(static_cast<int>(j)));
  }
}

}  // namespace

TEST(Packing, SingleDisk) {
  Packing p = pack_unit_disk({Family::of(1, 0.5)}, 1);
  ASSERT_EQ(p.disks().size(), 1u);
  EXPECT_LE(std::abs(p.disks()[0].center), 0.5);
  EXPECT_NEAR(p.coverage(), 0.25, 1e-15);
}

TEST(Packing, ManySmallDisks) {
  Packing p = pack_unit_disk({Family::of(168, 0.05)}, 1);
  EXPECT_EQ(p.disks().size(), 168u);
  EXPECT_NEAR(p.coverage(), 0.42, 1e-12);
  expect_valid(p);
}

TEST(Packing, AreaObstruction) {
  EXPECT_THROW(pack_unit_disk({Family::of(2, 0.8)}, 1), PackingError);
}

TEST(Packing, SeedsAgree) {
  Packing a = pack_unit_disk({Family::of(50, 0.1)}, 9);
  Packing b = pack_unit_disk({Family::of(50, 0.1)}, 9);
  for (std::size_t i = 0; i < a.disks().size(); ++i) EXPECT_EQ(a.disks()[i].center, b.disks()[i].center);
}

TEST(Packing, MixedFamiliesAndLocate) {
  Packing p = pack_unit_disk({Family::of(4, 0.2), Family::of(30, 0.05)}, 4);
  expect_valid(p);
  EXPECT_EQ(p.members(0).size(), 4u);
  EXPECT_EQ(p.members(1).size(), 30u);
  for (std::size_t i = 0; i < p.disks().size(); ++i) EXPECT_EQ(p.locate(p.disks()[i].center), static_cast<int>(i));
}

TEST(Packing, Saturation) {
  Packing p = saturate_unit_disk(0.1, 3, 40.0, 2, 250000);
  expect_valid(p);
  EXPECT_GT(p.coverage(), 0.65);
  EXPECT_LT(p.coverage(), 1.0);
  EXPECT_THROW(saturate_unit_disk(0.1, 3, 40.0, 2, 50), PackingError);
}
