#include "sdgame/instances.hpp"

#include <algorithm>
#include <cmath>

#include "sdgame/error.hpp"

namespace sdgame {

namespace {

Vector vec1(double v) { return Vector::Constant(1, v); }

GameSpec one_dim(std::string name, double horizon, double half_width, std::vector<double> actions) {
  GameSpec s;
  s.name = std::move(name);
  s.dim = 1;
  s.horizon = horizon;
  s.initial_state = vec1(0.0);
  for (double a : actions) s.actions.push_back(vec1(a));
  s.sigma = [](double, const Vector&) { return Matrix::Identity(1, 1); };
  s.drift = [](double, const Vector&, const Vector& a) -> Vector { return a; };
  s.running_reward = [](double, const Vector&, const Vector&) { return 0.0; };
  s.terminal_reward = [](const Vector&) { return 0.0; };
  s.bound_K = 1.0;
  s.state_box = StateBox{vec1(-half_width), vec1(half_width)};
  return s;
}

Instance no_control() {
  GameSpec s = one_dim("no-control", 1.0, 3.0, {-1.0, 1.0});
  s.drift = [](double, const Vector&, const Vector&) -> Vector { return Vector::Zero(1); };
  s.terminal_reward = [](const Vector& x) { return std::exp(-(x(0) - 1.0) * (x(0) - 1.0)); };
  return {"no-control",
          "zero drift, unit volatility, smooth bump reward g = exp(-(x-1)^2): pure optimal stopping",
          std::make_shared<const GameSpec>(std::move(s)),
          {3, 5},
          {50, 31},
          {{"V equals the Snell envelope of every policy node-for-node", "trivial", "control does not enter the chain"},
           {"every policy is thrifty", "trivial", "all policies induce the same chain"}}};
}

Instance constant_g() {
  GameSpec s = one_dim("constant-g", 1.0, 2.0, {-1.0, 1.0});
  s.drift = [](double, const Vector&, const Vector& a) -> Vector { return 0.5 * a; };
  s.terminal_reward = [](const Vector&) { return kConstantG; };
  return {"constant-g",
          "g = 2.5, h = 0, drift 0.5a: the value is the constant wherever defined",
          std::make_shared<const GameSpec>(std::move(s)),
          {3, 5},
          {40, 21},
          {{"V = 2.5 at every node", "trivial", "g constant and h = 0"}}};
}

Instance negative_h() {
  GameSpec s = one_dim("negative-h", 1.0, 2.0, {-1.0, 1.0});
  s.drift = [](double, const Vector&, const Vector& a) -> Vector { return 0.5 * a; };
  s.running_reward = [](double, const Vector&, const Vector&) { return kNegativeH; };
  return {"negative-h",
          "h = -1, g = 0: every step costs the stopper, so stopping at once is optimal",
          std::make_shared<const GameSpec>(std::move(s)),
          {3, 5},
          {40, 21},
          {{"rho(0) stops at the root and V(0, x0) = g(x0) = 0", "trivial", "continuation strictly lowers the payoff"}}};
}

Instance two_step_binomial() {
  GameSpec s = one_dim("two-step-binomial", 2.0, 2.0, {-0.4, 0.4});
  s.terminal_reward = [](const Vector& x) { return std::abs(x(0)); };
  return {"two-step-binomial",
          "dt = dx = 1, two steps, actions +-0.4, g = |x|: solvable by hand",
          std::make_shared<const GameSpec>(std::move(s)),
          {2, 5},
          {2, 5},
          {{"V(0, 0) = 1", "derived", "hand backward induction; exhaustive enumeration"},
           {"slice-1 nodes +-1 stop with V = 1", "derived", "hand backward induction"},
           {"frozen +0.4 policy: Z^u(1, 1) = 1.4, Z^u(0, 0) = 1.28", "derived", "hand backward induction"},
           {"frozen +0.4 policy: E|X_2| = 1.16", "derived", "path enumeration"}}};
}

Instance two_step_call() {
  GameSpec s = one_dim("two-step-call", 2.0, 2.0, {-0.4, 0.4});
  s.terminal_reward = [](const Vector& x) { return std::max(x(0), 0.0); };
  return {"two-step-call",
          "two-step lattice with g = max(x, 0): the action matters at the root",
          std::make_shared<const GameSpec>(std::move(s)),
          {2, 5},
          {2, 5},
          {{"V(0, 0) = 0.3 with ustar(0, 0) = -0.4", "derived", "hand backward induction; exhaustive enumeration"},
           {"frozen +0.4 policy: Z^u(0, 0) = 0.98", "derived", "hand backward induction"}}};
}

Instance bang_bang() {
  GameSpec s = one_dim("bang-bang-1d", 1.0, 4.0, {-kBangBangMu, kBangBangMu});
  s.terminal_reward = [](const Vector& x) { return std::log1p(std::exp(x(0))); };
  return {"bang-bang-1d",
          "drift a in {-0.25, +0.25}, g = log(1 + e^x) increasing and convex",
          std::make_shared<const GameSpec>(std::move(s)),
          {3, 5},
          {200, 81},
          {{"ustar = -0.25 at interior continuation nodes with positive discrete V-slope", "derived",
            "sign of the adjoint after solving"},
           {"Hamiltonian selector agrees with ustar on >= 95% of interior continuation nodes", "derived",
            "selector agreement count"}}};
}

}  // namespace

const std::vector<Instance>& catalog() {
  static const std::vector<Instance> entries{no_control(), constant_g(), negative_h(), two_step_binomial(),
                                             two_step_call(), bang_bang()};
  return entries;
}

std::vector<std::string> instance_names() {
  std::vector<std::string> out;
  for (const auto& i : catalog()) out.push_back(i.name);
  return out;
}

const Instance& instance(const std::string& name) {
  for (const auto& i : catalog()) {
    if (i.name == name) return i;
  }
  std::string list;
  for (const auto& n : instance_names()) list += (list.empty() ? "" : ", ") + n;
  throw Error("instances", "unknown instance '" + name + "'; available: " + list);
}

GameSpec builtin(const std::string& name) { return *instance(name).spec; }

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json facts = nlohmann::json::array();
  for (const auto& f : inst.facts) {
    facts.push_back({{"statement", f.statement}, {"provenance", f.provenance}, {"oracle", f.oracle}});
  }
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : inst.spec->actions) actions.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  return {{"name", inst.name},
          {"description", inst.description},
          {"dim", inst.spec->dim},
          {"horizon", inst.spec->horizon},
          {"actions", actions},
          {"tiny", {{"steps", inst.tiny.steps}, {"nodes_per_dim", inst.tiny.nodes_per_dim}}},
          {"base", {{"steps", inst.base.steps}, {"nodes_per_dim", inst.base.nodes_per_dim}}},
          {"facts", facts}};
}

}  // namespace sdgame
