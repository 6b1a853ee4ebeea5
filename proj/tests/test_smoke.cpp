// Compiles every public header and touches one code path per module.

#include <gtest/gtest.h>

#include "lampwalk/defect_geometry.hpp"
#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/io.hpp"
#include "lampwalk/lamp_group.hpp"
#include "lampwalk/lattice.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/stats.hpp"
#include "lampwalk/tsp.hpp"
#include "lampwalk/walk.hpp"
#include "lampwalk/wreath.hpp"

namespace lw = lampwalk;

TEST(Smoke, EveryModuleLinks) {
  lw::PhiloxRng rng(1, 0);
  EXPECT_GE(rng.next_unit(), 0.0);

  const lw::FreeGroup f2(2);
  EXPECT_EQ(f2.str(f2.multiply(f2.parse("ab"), f2.parse("Ba"))), "aa");

  const lw::IntegerLattice z2(2);
  EXPECT_EQ(z2.length({3, -4}), 7);

  const auto inst = lw::tsp::make_instance<lw::FreeGroup>(
      f2.identity(), f2.parse("a"), {f2.parse("b"), f2.parse("ab")});
  EXPECT_EQ(lw::tsp::solve(f2, inst).value, 5);

  const lw::Wreath w(lw::FiniteLampGroup::z2(), f2);
  EXPECT_EQ(w.word_length(w.identity()), 0);
  EXPECT_EQ(w.generators().size(), 5u);

  const auto mu = lw::walk::StepDistribution<std::decay_t<decltype(w)>>::uniform_standard(w);
  const auto traj = lw::walk::run_trajectory(w, mu, 8, 1);
  EXPECT_EQ(traj.checkpoints.back().step, 8);

  lw::stats::MomentAccumulator acc(2);
  acc.add(1.0);
  acc.add(3.0);
  EXPECT_DOUBLE_EQ(acc.mean(), 2.0);

  EXPECT_EQ(lw::io::hex16(0).size(), 16u);

  lw::PhiloxRng lemma_rng(7, 0);
  lw::lemma::RandomInstanceParams params;
  const auto li = lw::lemma::random_instance(f2, params, lemma_rng);
  if (li) EXPECT_TRUE(lw::lemma::certify(f2, *li).pass);
}
