#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <vector>

#include "lampwalk/rng.hpp"

namespace lw = lampwalk;

// Reference vectors for the 10-round, 4x32 variant.
TEST(Philox, KnownAnswerZeros) {
  const auto out = lw::PhiloxRng::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const std::uint32_t ff = 0xffffffffu;
  const auto out = lw::PhiloxRng::block({ff, ff, ff, ff}, {ff, ff});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, SameSeedSameStreamRepeats) {
  lw::PhiloxRng a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u32(), b.next_u32());
}

TEST(Philox, DistinctStreamsDiffer) {
  lw::PhiloxRng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u32() == b.next_u32();
  EXPECT_LT(same, 4);
}

TEST(Philox, DistinctSeedsDiffer) {
  lw::PhiloxRng a(1, 0), b(2, 0);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u32() == b.next_u32();
  EXPECT_LT(same, 4);
}

TEST(Philox, UnitIsInHalfOpenInterval) {
  lw::PhiloxRng rng(3, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Philox, UnitMeanNearHalf) {
  lw::PhiloxRng rng(4, 0);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.next_unit();
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Philox, NextBelowStaysInRangeAndHitsAll) {
  lw::PhiloxRng rng(5, 0);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t v = rng.next_below(7);
    ASSERT_LT(v, 7u);
    ++seen[static_cast<std::size_t>(v)];
  }
  for (const int c : seen) EXPECT_GT(c, 800);
}

TEST(Philox, NextBelowOneIsZero) {
  lw::PhiloxRng rng(6, 0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rng.next_below(1), 0u);
}
