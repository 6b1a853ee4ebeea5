#include <gtest/gtest.h>

#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/lattice.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/tsp.hpp"

namespace lw = lampwalk;
namespace tsp = lampwalk::tsp;

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

tsp::Instance<lw::FreeGroup> random_instance(const lw::FreeGroup& g, lw::PhiloxRng& rng,
                                             std::size_t n_points, int max_len) {
  std::vector<lw::Word> pts;
  for (std::size_t i = 0; i < n_points; ++i) pts.push_back(random_word(g, rng, max_len));
  return tsp::make_instance(g, random_word(g, rng, max_len), random_word(g, rng, max_len), pts);
}

}  // namespace

TEST(Tsp, FrozenTwoPointInstance) {
  const lw::FreeGroup g(2);
  const auto inst =
      tsp::make_instance(g, g.identity(), g.parse("a"), {g.parse("b"), g.parse("ab")});
  for (const auto& sol : {tsp::brute_force(g, inst), tsp::solve_dp(g, inst),
                          tsp::solve_tree(g, inst), tsp::solve(g, inst)}) {
    EXPECT_EQ(sol.value, 5);
    EXPECT_TRUE(sol.exact);
    ASSERT_EQ(sol.order.size(), 2u);
    EXPECT_EQ(g.str(inst.points[sol.order[0]]), "b");
    EXPECT_EQ(g.str(inst.points[sol.order[1]]), "ab");
  }
}

TEST(Tsp, EmptyInstanceIsTheDirectDistance) {
  const lw::FreeGroup g(2);
  const auto inst = tsp::make_instance(g, g.parse("ab"), g.parse("ba"), {});
  EXPECT_EQ(tsp::solve_tree(g, inst).value, g.distance(g.parse("ab"), g.parse("ba")));
  EXPECT_EQ(tsp::solve_dp(g, inst).value, tsp::solve_tree(g, inst).value);
  EXPECT_EQ(tsp::brute_force(g, inst).value, tsp::solve_tree(g, inst).value);
}

TEST(Tsp, MakeInstanceDeduplicates) {
  const lw::FreeGroup g(2);
  const auto inst = tsp::make_instance(
      g, g.identity(), g.identity(),
      {g.parse("a"), g.parse("b"), g.parse("a"), g.parse("b"), g.parse("a")});
  EXPECT_EQ(inst.points.size(), 2u);
  EXPECT_EQ(g.str(inst.points[0]), "a");
  EXPECT_EQ(g.str(inst.points[1]), "b");
}

TEST(Tsp, SolversAgreeOnSmallRandomInstances) {
  const lw::FreeGroup g(2);
  lw::PhiloxRng rng(31, 0);
  for (int i = 0; i < 400; ++i) {
    const auto inst = random_instance(g, rng, rng.next_below(8), 7);
    const auto b = tsp::brute_force(g, inst);
    const auto d = tsp::solve_dp(g, inst);
    const auto t = tsp::solve_tree(g, inst);
    ASSERT_EQ(b.value, d.value);
    ASSERT_EQ(b.value, t.value);
    ASSERT_EQ(b.order, d.order);  // both pick the lexicographically least optimum
    EXPECT_EQ(tsp::evaluate(g, inst, b.order), b.value);
    EXPECT_EQ(tsp::evaluate(g, inst, t.order), t.value);
  }
}

TEST(Tsp, TreeMatchesDpOnMediumInstances) {
  const lw::FreeGroup g(3);
  lw::PhiloxRng rng(32, 0);
  for (int i = 0; i < 60; ++i) {
    const auto inst = random_instance(g, rng, 10 + rng.next_below(9), 9);
    const auto d = tsp::solve_dp(g, inst);
    const auto t = tsp::solve_tree(g, inst);
    ASSERT_EQ(d.value, t.value);
    EXPECT_EQ(tsp::evaluate(g, inst, t.order), t.value);
  }
}

TEST(Tsp, OrderVisitsEveryPointOnce) {
  const lw::FreeGroup g(2);
  lw::PhiloxRng rng(33, 0);
  for (int i = 0; i < 50; ++i) {
    const auto inst = random_instance(g, rng, 6 + rng.next_below(6), 8);
    const auto t = tsp::solve_tree(g, inst);
    std::vector<bool> seen(inst.points.size(), false);
    ASSERT_EQ(t.order.size(), inst.points.size());
    for (const auto idx : t.order) {
      ASSERT_LT(idx, inst.points.size());
      ASSERT_FALSE(seen[idx]);
      seen[idx] = true;
    }
  }
}

TEST(Tsp, GuardsRejectOversizedInstances) {
  const lw::FreeGroup g(2);
  std::vector<lw::Word> many;
  for (int i = 1; i <= 25; ++i) many.push_back(lw::Word(static_cast<std::size_t>(i), 1));
  const auto big = tsp::make_instance(g, g.identity(), g.identity(), many);
  EXPECT_THROW(tsp::solve_dp(g, big), lw::GuardError);
  EXPECT_THROW(tsp::brute_force(g, big), lw::GuardError);
  EXPECT_NO_THROW(tsp::solve_tree(g, big));  // closed form has no size cap
}

TEST(Tsp, LatticeLineMatchesDp) {
  const lw::IntegerLattice g(1);
  lw::PhiloxRng rng(34, 0);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = rng.next_below(10);
    std::vector<lw::IntegerLattice::Element> pts;
    for (std::size_t k = 0; k < n; ++k)
      pts.push_back({static_cast<std::int64_t>(rng.next_below(41)) - 20});
    const lw::IntegerLattice::Element start{static_cast<std::int64_t>(rng.next_below(41)) - 20};
    const lw::IntegerLattice::Element end{static_cast<std::int64_t>(rng.next_below(41)) - 20};
    const auto inst = tsp::make_instance(g, start, end, pts);
    const auto sweep = tsp::solve_tree(g, inst);
    const auto dp = tsp::solve_dp(g, inst);
    ASSERT_EQ(sweep.value, dp.value);
    EXPECT_EQ(tsp::evaluate(g, inst, sweep.order), sweep.value);
  }
}

TEST(Tsp, LatticeLineHandlesHugeSupport) {
  const lw::IntegerLattice g(1);
  std::vector<lw::IntegerLattice::Element> pts;
  for (std::int64_t i = -500; i <= 500; ++i) pts.push_back({i});
  const auto inst = tsp::make_instance(g, lw::IntegerLattice::Element{0},
                                       lw::IntegerLattice::Element{100}, pts);
  const auto sol = tsp::solve_tree(g, inst);
  // Sweep left to -500 first, then right to 500, then back to 100.
  EXPECT_EQ(sol.value, 500 + 1000 + 400);
  EXPECT_EQ(tsp::evaluate(g, inst, sol.order), sol.value);
}

TEST(Tsp, PlanarLatticeUsesDp) {
  const lw::IntegerLattice g(2);
  lw::PhiloxRng rng(35, 0);
  for (int i = 0; i < 40; ++i) {
    std::vector<lw::IntegerLattice::Element> pts;
    const std::size_t n = rng.next_below(7);
    for (std::size_t k = 0; k < n; ++k)
      pts.push_back({static_cast<std::int64_t>(rng.next_below(11)) - 5,
                     static_cast<std::int64_t>(rng.next_below(11)) - 5});
    const auto inst = tsp::make_instance(g, g.identity(), g.identity(), pts);
    const auto sol = tsp::solve(g, inst);
    const auto b = tsp::brute_force(g, inst);
    ASSERT_EQ(sol.value, b.value);
  }
}

TEST(Tsp, ApproxIsFeasibleAndMarkedInexact) {
  const lw::FreeGroup g(2);
  lw::PhiloxRng rng(36, 0);
  for (int i = 0; i < 50; ++i) {
    const auto inst = random_instance(g, rng, 5 + rng.next_below(5), 8);
    const auto a = tsp::approx_two_opt(g, inst);
    const auto t = tsp::solve_tree(g, inst);
    EXPECT_FALSE(a.exact);
    EXPECT_GE(a.value, t.value);
    EXPECT_EQ(tsp::evaluate(g, inst, a.order), a.value);
  }
}
