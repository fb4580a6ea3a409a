#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "sdgame/game.hpp"
#include "sdgame/measure.hpp"

using namespace sdgame;
using sdtest::expect_error;

namespace {

bool within(const Estimate& e, double truth, double k = 3.0) { return std::abs(e.estimate - truth) <= k * e.se; }

}  // namespace

TEST(Measure, ZeroNoiseFollowsEulerRecursion) {
  const Lattice lat = sdtest::base_lattice("bang-bang-1d");
  const Policy u = Policy::uniform_random(lat, 5);
  SimulationOptions opts;
  opts.noise = NoiseKind::zero;
  const PathBundle b = simulate(lat, PathMode::controlled, &u, 3, 9, opts);
  const GameSpec& spec = lat.spec();
  for (std::size_t p = 0; p < 3; ++p) {
    double x = spec.initial_state(0);
    for (int s = 0; s < lat.steps(); ++s) {
      EXPECT_EQ(b.state(p, s)[0], x);
      const Vector xv = Vector::Constant(1, x);
      x = x + spec.drift(lat.time(s), xv, spec.actions[u(s, lat.nearest_node(xv))])(0) * lat.dt();
      EXPECT_EQ(b.increment(p, s)[0], 0.0);
    }
    EXPECT_EQ(b.state(p, lat.steps())[0], x);
  }
}

TEST(Measure, ReferenceAndControlledShareNoise) {
  const Lattice lat = sdtest::tiny_lattice("bang-bang-1d");
  const Policy u(lat, 1);
  const PathBundle r = simulate(lat, PathMode::reference, nullptr, 50, 4);
  const PathBundle c = simulate(lat, PathMode::controlled, &u, 50, 4);
  EXPECT_EQ(r.noise, c.noise);
  EXPECT_NE(r.states, c.states);
  const PathBundle again = simulate(lat, PathMode::reference, nullptr, 50, 4);
  EXPECT_EQ(r.states, again.states);
  const PathBundle other = simulate(lat, PathMode::reference, nullptr, 50, 5);
  EXPECT_NE(r.noise, other.noise);
}

TEST(Measure, IncrementsAreStandardGaussianScaled) {
  const Lattice lat = sdtest::base_lattice("no-control");
  const PathBundle b = simulate(lat, PathMode::reference, nullptr, 4000, 21);
  std::vector<double> z;
  for (double w : b.noise) z.push_back(w / std::sqrt(lat.dt()));
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= n - 1;
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
  EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / n));
}

TEST(Measure, ThreadCountDoesNotChangeResults) {
  const Lattice lat = sdtest::base_lattice("bang-bang-1d");
  const ValueField f = solve_game(lat);
  SimulationOptions one, four;
  four.threads = 4;
  const Estimate a = expected_payoff(lat, f.ustar, f.rho0, PayoffMode::reweight, 3000, 77, one);
  const Estimate b = expected_payoff(lat, f.ustar, f.rho0, PayoffMode::reweight, 3000, 77, four);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.se, b.se);
  EXPECT_EQ(simulate(lat, PathMode::reference, nullptr, 100, 3, one).states,
            simulate(lat, PathMode::reference, nullptr, 100, 3, four).states);
}

TEST(Measure, LikelihoodMultiplicativity) {
  const Lattice lat = sdtest::base_lattice("bang-bang-1d");
  const Policy u = Policy::uniform_random(lat, 2);
  const PathBundle b = simulate(lat, PathMode::reference, nullptr, 200, 8);
  const LikelihoodPath lr = likelihood_ratio(b, lat, u);
  for (std::size_t p = 0; p < lr.count; ++p) {
    EXPECT_EQ(lr.at(p, 0), 1.0);
    for (int s : {1, 50, 137}) {
      const double whole = lr.at(p, lat.steps());
      const double split = lr.between(p, 0, s) * lr.between(p, s, lat.steps());
      EXPECT_NEAR(split / whole, 1.0, 1e-12);
    }
  }
  const PathBundle c = simulate(lat, PathMode::controlled, &u, 5, 8);
  expect_error([&] { likelihood_ratio(c, lat, u); }, "measure", "reference");
}

TEST(Measure, TerminalLikelihoodHasUnitMean) {
  for (const char* name : {"bang-bang-1d", "two-step-call"}) {
    const Lattice lat = sdtest::base_lattice(name);
    const Estimate e = terminal_likelihood_mean(lat, Policy::uniform_random(lat, 1), 100000, 12);
    EXPECT_TRUE(within(e, 1.0)) << name << " " << e.estimate << " +- " << e.se;
    EXPECT_EQ(e.n_paths, 100000u);
  }
}

TEST(Measure, ReweightAndDirectAgreeWithQuadrature) {
  for (const char* name : {"two-step-binomial", "two-step-call"}) {
    const Lattice lat = sdtest::tiny_lattice(name);
    const ValueField f = solve_game(lat);
    const double truth = sdtest::euler_quadrature(lat.spec(), lat.steps(), lat.nodes_per_dim(),
                                                  sdtest::as_fn(lat, f.ustar), sdtest::as_fn(lat, f.rho0));
    const Estimate rw = expected_payoff(lat, f.ustar, f.rho0, PayoffMode::reweight, 100000, 31);
    const Estimate dr = expected_payoff(lat, f.ustar, f.rho0, PayoffMode::direct, 100000, 32);
    EXPECT_TRUE(within(rw, truth)) << name << ": " << rw.estimate << " +- " << rw.se << " vs " << truth;
    EXPECT_TRUE(within(dr, truth)) << name << ": " << dr.estimate << " +- " << dr.se << " vs " << truth;
    EXPECT_EQ(rw.mode, "reweight");
    EXPECT_EQ(dr.mode, "direct");
  }
}

TEST(Measure, QuadratureOracleSanity) {
  // stop at once: the payoff is g(x0) exactly
  const Lattice lat = sdtest::tiny_lattice("two-step-call");
  const StoppingRule now = StoppingRule::stop_from_slice(lat, 0);
  EXPECT_NEAR(sdtest::euler_quadrature(lat.spec(), 2, 5, sdtest::as_fn(lat, Policy(lat, 0)), sdtest::as_fn(lat, now)),
              0.0, 1e-15);
  // one step, drift +0.4, g = x^+: E[(0.4 + Z)^+] in closed form
  const StoppingRule at1 = StoppingRule::stop_from_slice(lat, 1);
  const double m = 0.4;
  const double closed = m * 0.5 * std::erfc(-m / std::sqrt(2.0)) + std::exp(-0.5 * m * m) / std::sqrt(2.0 * M_PI);
  EXPECT_NEAR(sdtest::euler_quadrature(lat.spec(), 2, 5, sdtest::as_fn(lat, Policy(lat, 1)), sdtest::as_fn(lat, at1)),
              closed, 1e-9);
}

TEST(Measure, ConstantRewardIsExactInDirectMode) {
  const Lattice lat = sdtest::base_lattice("constant-g");
  const Policy u = Policy::uniform_random(lat, 4);
  const StoppingRule tau = StoppingRule::uniform_random(lat, 4);
  const Estimate dr = expected_payoff(lat, u, tau, PayoffMode::direct, 2000, 3);
  EXPECT_EQ(dr.estimate, kConstantG);
  EXPECT_EQ(dr.se, 0.0);
  const Estimate rw = expected_payoff(lat, u, StoppingRule(lat, false), PayoffMode::reweight, 20000, 3);
  EXPECT_TRUE(within(rw, kConstantG)) << rw.estimate << " +- " << rw.se;
}

TEST(Measure, ConditionalChangeOfStrategy) {
  const Lattice lat = sdtest::base_lattice("bang-bang-1d");
  const Policy u = Policy::uniform_random(lat, 10);
  Policy v = u;
  for (int s = 100; s < lat.steps(); ++s) {
    for (std::size_t n = 0; n < lat.node_count(); ++n) v.set(s, static_cast<NodeId>(n), 1 - u(s, static_cast<NodeId>(n)));
  }
  const StrategyChangeReport r = conditional_change_of_strategy_check(lat, u, v, 100, 20000, 6);
  EXPECT_TRUE(r.agree) << r.difference << " vs " << r.combined_se;
  EXPECT_EQ(r.theta_slice, 100);
  expect_error([&] { conditional_change_of_strategy_check(lat, u, v, 150, 10, 6); }, "measure", "differ");
}

TEST(Measure, InputErrors) {
  const Lattice lat = sdtest::tiny_lattice("bang-bang-1d");
  const Policy u(lat, 0);
  expect_error([&] { simulate(lat, PathMode::controlled, nullptr, 5, 1); }, "measure", "policy");
  expect_error([&] { expected_payoff(lat, u, StoppingRule(lat, false), PayoffMode::direct, 0, 1); }, "measure",
               "n_paths");

  GameSpec sing = builtin("no-control");
  sing.sigma = [](double t, const Vector&) { return Matrix::Constant(1, 1, t > 0.5 ? 0.0 : 1.0); };
  const Lattice bad = build_lattice(sing, 3, 5);
  const PathBundle b = simulate(bad, PathMode::reference, nullptr, 2, 1);
  expect_error([&] { likelihood_ratio(b, bad, Policy(bad, 0)); }, "measure", "sigma singular on path 0 at slice 2");
}

TEST(Measure, PathsCsv) {
  const Lattice lat = sdtest::tiny_lattice("two-step-binomial");
  std::ostringstream os;
  write_paths_csv(os, simulate(lat, PathMode::reference, nullptr, 2, 1));
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "path,slice,t,x0,dW0");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Measure, PairwiseSumIsOrderStableAndAccurate) {
  std::vector<double> v(1 << 16, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 6553.6, 1e-9);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
  EXPECT_EQ(to_json(Estimate{1.5, 0.1, 10, "direct", 4})["n_paths"], 10);
}
