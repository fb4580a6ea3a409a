#include <gtest/gtest.h>

#include <set>

#include "helpers.hpp"
#include "sdgame/game.hpp"
#include "sdgame/instances.hpp"
#include "sdgame/snell.hpp"

using namespace sdgame;
using sdtest::expect_error;

TEST(Instances, CatalogContents) {
  const auto names = instance_names();
  const std::set<std::string> have(names.begin(), names.end());
  for (const char* required : {"no-control", "constant-g", "negative-h", "two-step-binomial", "bang-bang-1d"}) {
    EXPECT_TRUE(have.count(required)) << required;
  }
  for (const auto& inst : catalog()) {
    EXPECT_TRUE(validate_spec(*inst.spec, 100, 1).usable()) << inst.name;
    EXPECT_NO_THROW(build_lattice(inst.spec, inst.tiny.steps, inst.tiny.nodes_per_dim)) << inst.name;
    EXPECT_NO_THROW(build_lattice(inst.spec, inst.base.steps, inst.base.nodes_per_dim)) << inst.name;
    EXPECT_FALSE(inst.facts.empty()) << inst.name;
    for (const auto& f : inst.facts) EXPECT_TRUE(f.provenance == "trivial" || f.provenance == "derived") << inst.name;
    EXPECT_EQ(to_json(inst)["name"], inst.name);
  }
}

TEST(Instances, UnknownNameListsCatalog) {
  expect_error([] { builtin("nope"); }, "instances", "available: no-control, constant-g");
}

TEST(Instances, BuiltinReturnsACopy) {
  GameSpec s = builtin("constant-g");
  s.name = "changed";
  EXPECT_EQ(builtin("constant-g").name, "constant-g");
}

// Every documented fact, recomputed.

TEST(InstanceFacts, NoControl) {
  const Lattice lat = sdtest::base_lattice("no-control");
  const ValueField f = solve_game(lat);
  const SnellField z = snell_solve(lat, Policy(lat, 1));
  EXPECT_EQ(f.V, z.Z);
}

TEST(InstanceFacts, ConstantG) {
  const ValueField f = solve_game(sdtest::base_lattice("constant-g"));
  for (double v : f.V.data()) EXPECT_EQ(v, kConstantG);
}

TEST(InstanceFacts, NegativeH) {
  const Lattice lat = sdtest::base_lattice("negative-h");
  const ValueField f = solve_game(lat);
  EXPECT_TRUE(f.rho0.stops(0, lat.root()));
  EXPECT_EQ(f.V(0, lat.root()), lat.terminal_reward(lat.root()));
}

TEST(InstanceFacts, TwoStepInstances) {
  {
    const Lattice lat = sdtest::tiny_lattice("two-step-binomial");
    const sdtest::PathTree tree(lat.spec(), 2, 5);
    EXPECT_NEAR(tree.game_value(0, 2), 1.0, 1e-15);
    EXPECT_NEAR(solve_game(lat).V(0, lat.root()), 1.0, 1e-15);
    const auto up = [](int, int) { return std::size_t{1}; };
    EXPECT_NEAR(tree.snell_value(up, 1, 3), 1.4, 1e-15);
    EXPECT_NEAR(tree.snell_value(up, 0, 2), 1.28, 1e-15);
    EXPECT_NEAR(tree.payoff_by_paths(up, [](int s, int) { return s == 2; }), 1.16, 1e-15);
  }
  {
    const Lattice lat = sdtest::tiny_lattice("two-step-call");
    const sdtest::PathTree tree(lat.spec(), 2, 5);
    const ValueField f = solve_game(lat);
    EXPECT_NEAR(tree.game_value(0, 2), 0.3, 1e-15);
    EXPECT_NEAR(f.V(0, lat.root()), 0.3, 1e-15);
    EXPECT_EQ(lat.spec().actions[f.ustar(0, lat.root())](0), -0.4);
    EXPECT_NEAR(tree.snell_value([](int, int) { return std::size_t{1}; }, 0, 2), 0.98, 1e-15);
  }
}

TEST(InstanceFacts, BangBang) {
  const Lattice lat = sdtest::base_lattice("bang-bang-1d");
  const ValueField f = solve_game(lat);
  EXPECT_GE(selector_agreement(f, lat).agreement_fraction(), 0.95);
  EXPECT_DOUBLE_EQ(lat.spec().actions[0](0), -kBangBangMu);
}
