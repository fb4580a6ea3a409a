#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "sdgame/game.hpp"
#include "sdgame/oracle.hpp"
#include "sdgame/snell.hpp"

using namespace sdgame;
using sdtest::expect_error;

TEST(Oracle, TwoStepBinomialValue) {
  const Lattice lat = sdtest::tiny_lattice("two-step-binomial");
  const EnumerationResult r = enumerate_values(lat);
  EXPECT_NEAR(r.upper, 1.0, 1e-15);
  EXPECT_NEAR(r.lower, 1.0, 1e-15);
  EXPECT_EQ(r.decision_nodes, 3u);  // the root and x = +-1 at slice 1
  EXPECT_EQ(r.policy_count, 8u);
  EXPECT_EQ(r.pair_count, r.policy_count * r.rule_count);
  EXPECT_EQ(to_json(r)["upper_value"], r.upper);
}

TEST(Oracle, UpperEqualsLowerEqualsDynamicProgramming) {
  for (const auto& name : instance_names()) {
    const Lattice lat = sdtest::tiny_lattice(name);
    const EnumerationResult r = enumerate_values(lat);
    const double v0 = solve_game(lat).V(0, lat.root());
    EXPECT_LE(r.lower, r.upper + 1e-15) << name;
    EXPECT_NEAR(r.upper, r.lower, 1e-12) << name;
    EXPECT_NEAR(r.upper, v0, 1e-12) << name;
  }
}

TEST(Oracle, RandomSpecsAgreeWithDynamicProgramming) {
  sdtest::RandomSpecGen gen(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const Lattice lat = build_lattice(gen.next(2), 3, 5);
    const EnumerationResult r = enumerate_values(lat);
    EXPECT_NEAR(r.upper, r.lower, 1e-12);
    EXPECT_NEAR(r.upper, solve_game(lat).V(0, lat.root()), 1e-12);
  }
}

TEST(Oracle, NoControlEqualsSnellValue) {
  const Lattice lat = sdtest::tiny_lattice("no-control");
  const EnumerationResult r = enumerate_values(lat);
  EXPECT_NEAR(r.upper, snell_solve(lat, Policy(lat, 0)).Z(0, lat.root()), 1e-12);
}

TEST(Oracle, SingleStepIsOneComparison) {
  const GameSpec spec = builtin("bang-bang-1d");
  const Lattice lat = build_lattice(spec, 1, 5);
  const EnumerationResult r = enumerate_values(lat);
  double best = INFINITY;
  for (std::size_t a = 0; a < 2; ++a) {
    double e = 0.0;
    for (const Outcome& o : lat.transition(0, lat.root(), a)) e += o.prob * lat.terminal_reward(o.node);
    best = std::min(best, e);
  }
  EXPECT_NEAR(r.upper, std::max(lat.terminal_reward(lat.root()), best), 1e-15);
}

TEST(Oracle, MinOverPoliciesOfSnellIsValue) {
  const Lattice lat = sdtest::tiny_lattice("two-step-call");
  const double v0 = solve_game(lat).V(0, lat.root());
  double best = INFINITY;
  for (int bits = 0; bits < 8; ++bits) {
    Policy u(lat, 0);
    u.set(0, lat.root(), bits & 1);
    u.set(1, sdtest::node1(lat, 1), (bits >> 1) & 1);
    u.set(1, sdtest::node1(lat, 3), (bits >> 2) & 1);
    best = std::min(best, snell_solve(lat, u).Z(0, lat.root()));
  }
  EXPECT_NEAR(best, v0, 1e-12);
}

TEST(Oracle, CapsAreHardErrors) {
  const Lattice lat = sdtest::base_lattice("no-control");
  expect_error([&] { enumerate_values(lat); }, "oracle", "cap is 1048576");
  OracleOptions small;
  small.max_pair_evaluations = 4;
  expect_error([&] { enumerate_values(sdtest::tiny_lattice("two-step-binomial"), small); }, "oracle", "needs");
}

TEST(Oracle, SaddleCheckPassesForSolvedPair) {
  for (const auto& name : instance_names()) {
    const Lattice lat = sdtest::tiny_lattice(name);
    const ValueField f = solve_game(lat);
    const SaddleCheckResult r = enumerate_saddle_check(lat, f.ustar, f.rho0);
    EXPECT_TRUE(r.pass) << name;
    EXPECT_NEAR(r.middle, f.V(0, lat.root()), 1e-12) << name;
    EXPECT_EQ(r.worst.side, SaddleViolation::Side::none);
  }
}

TEST(Oracle, FlippedActionIsNamed) {
  const Lattice lat = sdtest::tiny_lattice("two-step-call");
  const ValueField f = solve_game(lat);
  Policy flipped = f.ustar;
  flipped.set(0, lat.root(), 1);
  const SaddleCheckResult r = enumerate_saddle_check(lat, flipped, f.rho0);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.worst.side, SaddleViolation::Side::controller);
  EXPECT_NEAR(r.max_controller_gain, 0.4, 1e-15);
  ASSERT_EQ(r.worst.deviations.size(), 1u);
  EXPECT_EQ(r.worst.deviations[0].first, 0);
  EXPECT_EQ(r.worst.deviations[0].second, lat.root());
}

TEST(Oracle, NeverStoppingWithNegativeRewardFails) {
  const Lattice lat = sdtest::tiny_lattice("negative-h");
  const ValueField f = solve_game(lat);
  const SaddleCheckResult r = enumerate_saddle_check(lat, f.ustar, StoppingRule(lat, false));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.worst.side, SaddleViolation::Side::stopper);
  EXPECT_NEAR(r.max_stopper_gain, 1.0, 1e-12);
  EXPECT_NEAR(r.middle, -1.0, 1e-12);
}

TEST(Oracle, SubgameHorizonIdentity) {
  const Lattice lat = sdtest::tiny_lattice("bang-bang-1d");
  const ValueField f = solve_game(lat);
  for (int theta = 0; theta <= lat.steps(); ++theta) {
    const SubgameValues v = enumerate_subgame(lat, 0, lat.root(), theta, f.V.row(theta));
    EXPECT_NEAR(v.lower, v.upper, 1e-12);
    EXPECT_NEAR(v.horizon_min, v.lower, 1e-12);
    if (theta == 0) EXPECT_NEAR(v.lower, f.V(0, lat.root()), 1e-12);
  }
  expect_error([&] { enumerate_subgame(lat, 1, lat.root(), 0, f.V.row(0)); }, "oracle", "range");
}

TEST(Oracle, PayoffCsv) {
  const Lattice lat = sdtest::tiny_lattice("two-step-binomial");
  OracleOptions o;
  o.keep_table = true;
  const EnumerationResult r = enumerate_values(lat, o);
  ASSERT_EQ(r.payoff_table.size(), r.pair_count);
  std::ostringstream os;
  write_payoff_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "policy,rule,payoff");
  expect_error([&] { write_payoff_csv(os, enumerate_values(lat)); }, "oracle", "keep_table");
}
