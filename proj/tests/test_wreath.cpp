#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/lamp_group.hpp"
#include "lampwalk/lattice.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/wreath.hpp"

namespace lw = lampwalk;

namespace {

using WZ2F2 = lw::Wreath<lw::FiniteLampGroup, lw::FreeGroup>;

lw::Word random_word(const lw::FreeGroup& g, lw::PhiloxRng& rng, int max_len) {
  const int len = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_len + 1)));
  lw::Word raw;
  for (int i = 0; i < len; ++i) {
    const int letter = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(g.rank())));
    raw.push_back(rng.next_unit() < 0.5 ? letter : -letter);
  }
  return g.reduce(raw);
}

WZ2F2::Element random_element(const WZ2F2& w, lw::PhiloxRng& rng) {
  WZ2F2::Element e = w.identity();
  const std::size_t n_lamps = rng.next_below(4);
  for (std::size_t i = 0; i < n_lamps; ++i) {
    WZ2F2::Element lamp = w.identity();
    lamp.lamps[random_word(w.base(), rng, 5)] = 1;
    e = w.multiply(e, w.multiply(lamp, w.identity()));
  }
  WZ2F2::Element move = w.identity();
  move.pos = random_word(w.base(), rng, 5);
  return w.multiply(e, move);
}

}  // namespace

TEST(Wreath, FrozenProduct) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  const auto x = w.parse("1=1;a");
  const auto y = w.parse("1=1;b");
  const auto p = w.multiply(x, y);
  EXPECT_EQ(w.str(p), "1=1+a=1;ab");
}

TEST(Wreath, LampsCancelToIdentity) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  const auto x = w.parse("1=1;1");
  EXPECT_EQ(w.multiply(x, x), w.identity());  // identity-valued lamps are never stored
}

TEST(Wreath, InverseMovesLampsThroughThePosition) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  const auto x = w.parse("a=1;ab");
  const auto inv = w.inverse(x);
  EXPECT_EQ(w.multiply(x, inv), w.identity());
  EXPECT_EQ(w.multiply(inv, x), w.identity());
  EXPECT_EQ(w.base().str(inv.pos), "BA");
}

TEST(Wreath, GroupAxiomsOnRandomElements) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  lw::PhiloxRng rng(41, 0);
  for (int i = 0; i < 150; ++i) {
    const auto x = random_element(w, rng);
    const auto y = random_element(w, rng);
    const auto z = random_element(w, rng);
    EXPECT_EQ(w.multiply(w.multiply(x, y), z), w.multiply(x, w.multiply(y, z)));
    EXPECT_EQ(w.multiply(x, w.identity()), x);
    EXPECT_EQ(w.multiply(w.identity(), x), x);
    EXPECT_EQ(w.multiply(x, w.inverse(x)), w.identity());
  }
}

TEST(Wreath, FrozenWordLength) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  // Toggle at the origin, walk to a, toggle, walk to ab: four generators.
  EXPECT_EQ(w.word_length(w.parse("1=1+a=1;ab")), 4);
  EXPECT_EQ(w.word_length(w.parse("1=1;1")), 1);
  EXPECT_EQ(w.word_length(w.parse(";ab")), 2);
  // A lamp behind the walker forces a detour.
  EXPECT_EQ(w.word_length(w.parse("B=1;a")), 4);  // id -> B (2 steps +1 toggle)... then to a
}

TEST(Wreath, WordLengthOfInverseMatches) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  lw::PhiloxRng rng(42, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_element(w, rng);
    EXPECT_EQ(w.word_length(x), w.word_length(w.inverse(x)));
  }
}

TEST(Wreath, VectorLampCostsAreL1) {
  const lw::Wreath w(lw::ZdLampGroup(2), lw::FreeGroup(2));
  const auto e = w.parse("1=2:-1;1");
  EXPECT_EQ(w.lamp_cost(e), 3);
  EXPECT_EQ(w.word_length(e), 3);
  const auto far = w.parse("a=1:1;1");
  EXPECT_EQ(w.word_length(far), 2 + 2);  // out to a and back, two lamp increments
}

TEST(Wreath, GeneratorsAreLampFirstThenBase) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  const auto gens = w.generators();
  ASSERT_EQ(gens.size(), 5u);
  EXPECT_EQ(w.str(gens[0]), "1=1;1");
  for (std::size_t i = 1; i < gens.size(); ++i) {
    EXPECT_TRUE(gens[i].lamps.empty());
    EXPECT_EQ(w.base().length(gens[i].pos), 1);
  }
  for (const auto& g : gens) EXPECT_EQ(w.word_length(g), 1);
}

TEST(Wreath, BallOfRadiusOne) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  const auto ball = w.bfs_ball(1);
  ASSERT_EQ(ball.size(), 6u);
  EXPECT_EQ(ball[0].second, 0);
  for (std::size_t i = 1; i < ball.size(); ++i) EXPECT_EQ(ball[i].second, 1);
}

TEST(Wreath, BallDistancesMatchWordLength) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  for (const auto& [e, d] : w.bfs_ball(3)) EXPECT_EQ(w.word_length(e), d) << w.str(e);
}

TEST(Wreath, BallGuardTrips) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  EXPECT_THROW(w.bfs_ball(5, 100), lw::GuardError);
}

TEST(Wreath, ParseRejectsMalformedElements) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  EXPECT_THROW(w.parse("a=1"), lw::ConfigError);       // missing position
  EXPECT_THROW(w.parse("a=9;1"), lw::ConfigError);     // lamp value out of range
  EXPECT_THROW(w.parse("a+b;1"), lw::ConfigError);     // lamp entry without '='
  EXPECT_EQ(w.parse(";1"), w.identity());
  EXPECT_EQ(w.parse("=1;a"), w.parse("1=1;a"));        // empty word is the identity site
}

TEST(Wreath, StrParseRoundTrip) {
  const WZ2F2 w(lw::FiniteLampGroup::z2(), lw::FreeGroup(2));
  lw::PhiloxRng rng(43, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_element(w, rng);
    EXPECT_EQ(w.parse(w.str(x)), x);
  }
}

TEST(Wreath, LatticeBaseWordLengthMatchesBfs) {
  const lw::Wreath w(lw::FiniteLampGroup::z2(), lw::IntegerLattice(1));
  for (const auto& [e, d] : w.bfs_ball(4)) EXPECT_EQ(w.word_length(e), d) << w.str(e);
}

TEST(FiniteLampGroup, ValidatesTables) {
  EXPECT_NO_THROW(lw::FiniteLampGroup(3, {0, 1, 2, 1, 2, 0, 2, 0, 1}));  // cyclic
  EXPECT_THROW(lw::FiniteLampGroup(2, {0, 1, 1, 1}), lw::ConfigError);   // no inverse for 1
  EXPECT_THROW(lw::FiniteLampGroup(2, {1, 1, 1, 1}), lw::ConfigError);   // no identity at all
  EXPECT_EQ(lw::FiniteLampGroup(2, {1, 0, 0, 1}).identity(), 1);         // identity found anywhere
  EXPECT_THROW(lw::FiniteLampGroup(2, {0, 1, 1}), lw::ConfigError);      // wrong table size
  EXPECT_THROW(lw::FiniteLampGroup(2, {0, 3, 3, 0}), lw::ConfigError);   // value out of range
  // Identity and inverses fine, associativity broken.
  EXPECT_THROW(lw::FiniteLampGroup(3, {0, 1, 2, 1, 0, 1, 2, 1, 0}), lw::ConfigError);
}

TEST(FiniteLampGroup, CyclicThreeBehaves) {
  const lw::FiniteLampGroup z3(3, {0, 1, 2, 1, 2, 0, 2, 0, 1});
  EXPECT_EQ(z3.multiply(1, 2), 0);
  EXPECT_EQ(z3.inverse(1), 2);
  EXPECT_EQ(z3.cost(0), 0);
  EXPECT_EQ(z3.cost(2), 1);
  EXPECT_EQ(z3.generators().size(), 2u);
}
