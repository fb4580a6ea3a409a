#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "sdgame/error.hpp"
#include "sdgame/instances.hpp"
#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

namespace sdtest {

inline sdgame::Lattice tiny_lattice(const std::string& name) {
  const auto& inst = sdgame::instance(name);
  return sdgame::build_lattice(inst.spec, inst.tiny.steps, inst.tiny.nodes_per_dim);
}

inline sdgame::Lattice base_lattice(const std::string& name) {
  const auto& inst = sdgame::instance(name);
  return sdgame::build_lattice(inst.spec, inst.base.steps, inst.base.nodes_per_dim);
}

inline sdgame::NodeId node1(const sdgame::Lattice& lattice, int index) { return lattice.node_at({index}); }

inline PolicyFn as_fn(const sdgame::Lattice& lattice, const sdgame::Policy& u) {
  return [&lattice, u](int s, int i) { return u(s, lattice.node_at({i})); };
}

inline StopFn as_fn(const sdgame::Lattice& lattice, const sdgame::StoppingRule& r) {
  return [&lattice, r](int s, int i) { return r.stops(s, lattice.node_at({i})); };
}

/// Runs `fn`, expecting sdgame::Error from `module` whose message contains `needle`.
inline void expect_error(const std::function<void()>& fn, const std::string& module, const std::string& needle) {
  try {
    fn();
    ADD_FAILURE() << "expected sdgame::Error(" << module << ")";
  } catch (const sdgame::Error& e) {
    EXPECT_EQ(e.module(), module) << e.what();
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

/// Random 1-D spec with affine drift in the action and bounded coefficients,
/// sized so that a (steps, nodes) lattice is admissible.
struct RandomSpecGen {
  std::mt19937_64 rng;
  explicit RandomSpecGen(std::uint64_t seed) : rng(seed) {}

  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

  sdgame::GameSpec next(int n_actions = 2) {
    sdgame::GameSpec s;
    s.name = "random";
    s.dim = 1;
    s.horizon = uni(0.5, 1.5);
    s.initial_state = sdgame::Vector::Constant(1, uni(-0.5, 0.5));
    for (int k = 0; k < n_actions; ++k) s.actions.push_back(sdgame::Vector::Constant(1, uni(-1.0, 1.0)));
    const double sig = uni(0.8, 1.2);
    const double c1 = uni(-1, 1), c2 = uni(-1, 1), c3 = uni(-0.5, 0.5), c4 = uni(-1, 1);
    const double h0 = uni(-0.5, 0.5), h1 = uni(-0.3, 0.3);
    s.sigma = [sig](double, const sdgame::Vector&) { return sdgame::Matrix::Constant(1, 1, sig); };
    s.drift = [](double, const sdgame::Vector&, const sdgame::Vector& a) -> sdgame::Vector { return 0.5 * a; };
    s.running_reward = [h0, h1](double, const sdgame::Vector& x, const sdgame::Vector& a) {
      return h0 + h1 * std::tanh(x(0)) * a(0);
    };
    s.terminal_reward = [c1, c2, c3, c4](const sdgame::Vector& x) {
      return c1 + c2 * std::sin(x(0)) + c3 * x(0) * x(0) + c4 * std::abs(x(0) - 0.3);
    };
    s.bound_K = 2.0;
    s.state_box = sdgame::StateBox{sdgame::Vector::Constant(1, -2.0), sdgame::Vector::Constant(1, 2.0)};
    return s;
  }
};

}  // namespace sdtest
