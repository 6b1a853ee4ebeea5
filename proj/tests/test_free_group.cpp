#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/rng.hpp"

namespace lw = lampwalk;

namespace {

lw::Word random_word(const lw::FreeGroup& g, lw::PhiloxRng& rng, int max_len) {
  const int len = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_len + 1)));
  lw::Word raw;
  for (int i = 0; i < len; ++i) {
    const int letter = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(g.rank())));
    raw.push_back(rng.next_unit() < 0.5 ? letter : -letter);
  }
  return g.reduce(raw);
}

}  // namespace

TEST(FreeGroup, ReduceCancelsAdjacentInverses) {
  const lw::FreeGroup g(2);
  EXPECT_EQ(g.str(g.reduce(g.parse("abBa"))), "aa");
  EXPECT_EQ(g.str(g.reduce({1, -1})), "1");
  EXPECT_EQ(g.str(g.reduce({1, 2, -2, -1})), "1");
}

TEST(FreeGroup, ParseAndStrRoundTrip) {
  const lw::FreeGroup g(3);
  for (const std::string s : {"1", "a", "A", "abc", "aBc", "aaBBcc"}) {
    EXPECT_EQ(g.str(g.parse(s)), s);
  }
  EXPECT_EQ(g.str(g.parse("")), "1");
  EXPECT_THROW(g.parse("xyz"), lw::ConfigError);  // letters outside the rank
  EXPECT_THROW(g.parse("a b"), lw::ConfigError);
}

TEST(FreeGroup, MultiplyCancelsAtBoundary) {
  const lw::FreeGroup g(2);
  EXPECT_EQ(g.str(g.multiply(g.parse("ab"), g.parse("Ba"))), "aa");
  EXPECT_EQ(g.str(g.multiply(g.parse("ab"), g.parse("BA"))), "1");
}

TEST(FreeGroup, FrozenDistance) {
  const lw::FreeGroup g(2);
  EXPECT_EQ(g.distance(g.parse("aab"), g.parse("aaaaaaab")), 7);
  EXPECT_EQ(g.distance(g.identity(), g.parse("ab")), 2);
  EXPECT_EQ(g.distance(g.parse("ab"), g.parse("ab")), 0);
}

TEST(FreeGroup, GroupAxiomsOnRandomWords) {
  const lw::FreeGroup g(3);
  lw::PhiloxRng rng(11, 0);
  for (int i = 0; i < 300; ++i) {
    const auto x = random_word(g, rng, 12);
    const auto y = random_word(g, rng, 12);
    const auto z = random_word(g, rng, 12);
    EXPECT_EQ(g.multiply(g.multiply(x, y), z), g.multiply(x, g.multiply(y, z)));
    EXPECT_EQ(g.multiply(x, g.identity()), x);
    EXPECT_EQ(g.multiply(g.identity(), x), x);
    EXPECT_EQ(g.multiply(x, g.inverse(x)), g.identity());
    EXPECT_EQ(g.length(g.inverse(x)), g.length(x));
  }
}

TEST(FreeGroup, MetricAxiomsOnRandomWords) {
  const lw::FreeGroup g(2);
  lw::PhiloxRng rng(12, 0);
  for (int i = 0; i < 300; ++i) {
    const auto x = random_word(g, rng, 10);
    const auto y = random_word(g, rng, 10);
    const auto z = random_word(g, rng, 10);
    EXPECT_EQ(g.distance(x, y), g.distance(y, x));
    EXPECT_GE(g.distance(x, y), 0);
    EXPECT_EQ(g.distance(x, y) == 0, x == y);
    EXPECT_LE(g.distance(x, z), g.distance(x, y) + g.distance(y, z));
    // Left invariance.
    EXPECT_EQ(g.distance(g.multiply(z, x), g.multiply(z, y)), g.distance(x, y));
    // Word length is the distance from the identity.
    EXPECT_EQ(g.distance(g.identity(), x), g.length(x));
  }
}

TEST(FreeGroup, GeodesicIsUniqueAndUnitSpeed) {
  const lw::FreeGroup g(3);
  const auto path = g.geodesic(g.parse("ab"), g.parse("ac"));
  ASSERT_EQ(path.size(), 3u);
  EXPECT_EQ(g.str(path[0]), "ab");
  EXPECT_EQ(g.str(path[1]), "a");
  EXPECT_EQ(g.str(path[2]), "ac");
  lw::PhiloxRng rng(13, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_word(g, rng, 8);
    const auto y = random_word(g, rng, 8);
    const auto p = g.geodesic(x, y);
    ASSERT_EQ(static_cast<std::int64_t>(p.size()), g.distance(x, y) + 1);
    EXPECT_EQ(p.front(), x);
    EXPECT_EQ(p.back(), y);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) EXPECT_EQ(g.distance(p[k], p[k + 1]), 1);
  }
}

TEST(FreeGroup, GeodesicFixesWrongWayRoundTrip) {
  // The path from ab to ac must pass through a, never through id.
  const lw::FreeGroup g(3);
  const auto p = g.geodesic(g.parse("ab"), g.parse("ac"));
  EXPECT_EQ(std::count(p.begin(), p.end(), g.identity()), 0);
}

TEST(FreeGroup, ProjectionFrozenExamples) {
  const lw::FreeGroup g(2);
  std::vector<lw::Word> seg;
  for (int k = 0; k <= 5; ++k) seg.push_back(lw::Word(static_cast<std::size_t>(k), 1));
  {
    const auto pr = g.project_to_geodesic(g.parse("aab"), seg);
    EXPECT_EQ(g.str(pr.vertex), "aa");
    EXPECT_EQ(pr.distance, 1);
    EXPECT_EQ(pr.index, 2u);
  }
  {
    const auto pr = g.project_to_geodesic(g.parse("bbb"), seg);
    EXPECT_EQ(g.str(pr.vertex), "1");
    EXPECT_EQ(pr.distance, 3);
    EXPECT_EQ(pr.index, 0u);
  }
}

TEST(FreeGroup, ProjectionMinimizesOverSegment) {
  const lw::FreeGroup g(2);
  lw::PhiloxRng rng(14, 0);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_word(g, rng, 8);
    const auto b = random_word(g, rng, 8);
    const auto seg = g.geodesic(a, b);
    const auto x = random_word(g, rng, 8);
    const auto pr = g.project_to_geodesic(x, seg);
    for (const auto& v : seg) EXPECT_LE(pr.distance, g.distance(x, v));
    EXPECT_EQ(g.distance(x, seg[pr.index]), pr.distance);
  }
}

TEST(TreeArena, WalkMatchesWordOperations) {
  const lw::FreeGroup g(2);
  lw::TreeArena arena(2);
  lw::PhiloxRng rng(15, 0);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_word(g, rng, 20);
    const auto y = random_word(g, rng, 20);
    const auto nx = arena.walk(lw::TreeArena::kRoot, x);
    const auto ny = arena.walk(lw::TreeArena::kRoot, y);
    EXPECT_EQ(arena.word(nx), x);
    EXPECT_EQ(arena.depth(nx), g.length(x));
    EXPECT_EQ(arena.dist(nx, ny), g.distance(x, y));
    const auto l = arena.lca(nx, ny);
    EXPECT_EQ(static_cast<std::int64_t>(arena.word(l).size()),
              static_cast<std::int64_t>(lw::common_prefix(x, y)));
  }
}

TEST(TreeArena, StepFollowsSingleLetters) {
  const lw::FreeGroup g(2);
  lw::TreeArena arena(2);
  std::int32_t n = lw::TreeArena::kRoot;
  n = arena.step(n, 1);
  n = arena.step(n, 2);
  EXPECT_EQ(arena.word(n), g.parse("ab"));
  n = arena.step(n, -2);  // backtracks to the parent rather than growing
  EXPECT_EQ(arena.word(n), g.parse("a"));
  n = arena.step(n, -1);
  EXPECT_EQ(n, lw::TreeArena::kRoot);
}

TEST(FreeGroup, GeneratorsPairInverses) {
  const lw::FreeGroup g(3);
  const auto gens = g.generators();
  ASSERT_EQ(gens.size(), 6u);
  for (std::size_t i = 0; i < gens.size(); ++i)
    EXPECT_EQ(g.inverse(gens[i]), gens[i ^ 1]);
}

TEST(FreeGroup, RankValidation) {
  EXPECT_THROW(lw::FreeGroup(1), lw::ConfigError);
  EXPECT_THROW(lw::FreeGroup(0), lw::ConfigError);
  EXPECT_NO_THROW(lw::FreeGroup(2));
}
