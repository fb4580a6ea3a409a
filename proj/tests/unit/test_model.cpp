#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sdgame/model.hpp"
#include "sdgame/spec_json.hpp"

using namespace sdgame;
using sdtest::expect_error;

namespace {

GameSpec simple() { return builtin("two-step-binomial"); }

nlohmann::json affine_doc() {
  return nlohmann::json::parse(R"({
    "name": "affine",
    "dim": 1,
    "horizon": 1.0,
    "initial_state": [0.0],
    "actions": [-0.5, 0.5],
    "bound_K": 2.0,
    "state_box": {"lower": [-2.0], "upper": [2.0]},
    "sigma": {"type": "constant", "value": [[1.0]]},
    "drift": {"type": "affine", "constant": [0.1], "action": [[1.0]]},
    "running_reward": {"type": "affine", "constant": 0.2, "state": [0.1]},
    "terminal_reward": {"type": "tabulated", "coordinate": 0, "points": [-1.0, 0.0, 1.0], "values": [1.0, 0.0, 2.0]}
  })");
}

}  // namespace

TEST(Model, FindActionMatchesWithinTolerance) {
  const GameSpec s = simple();
  EXPECT_EQ(find_action(s, Vector::Constant(1, 0.4)), std::optional<std::size_t>{1});
  EXPECT_EQ(find_action(s, Vector::Constant(1, -0.4 + 1e-13)), std::optional<std::size_t>{0});
  EXPECT_FALSE(find_action(s, Vector::Constant(1, 0.5)).has_value());
  expect_error([&] { require_action(s, Vector::Constant(1, 0.5)); }, "model", "not in the action set");
}

TEST(Model, EvaluateCoefficients) {
  const GameSpec s = simple();
  const Coefficients c = evaluate_coefficients(s, 0.5, Vector::Constant(1, 1.0), Vector::Constant(1, -0.4));
  EXPECT_DOUBLE_EQ(c.drift(0), -0.4);
  EXPECT_DOUBLE_EQ(c.vol(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.reward, 0.0);
  expect_error([&] { evaluate_coefficients(s, 0.0, Vector::Zero(1), Vector::Constant(1, 7.0)); }, "model",
               "action");
  expect_error([&] { evaluate_coefficients(s, 2.5, Vector::Zero(1), Vector::Constant(1, 0.4)); }, "model", "t");
}

TEST(Model, BuiltinsPassValidation) {
  for (const auto& name : instance_names()) {
    const ValidationReport r = validate_spec(builtin(name), 200, 7);
    EXPECT_TRUE(r.usable()) << name << ": " << r.failure_message();
    EXPECT_EQ(r.probes, 200);
  }
}

TEST(Model, FirstProbeIsInitialPoint) {
  GameSpec s = simple();
  // singular exactly at the initial state only: random probes would miss it
  s.sigma = [](double t, const Vector& x) {
    return Matrix::Constant(1, 1, (t == 0.0 && x(0) == 0.0) ? 0.0 : 1.0);
  };
  const ValidationReport r = validate_spec(s, 5, 1);
  EXPECT_FALSE(r.usable());
  EXPECT_NE(r.failure_message().find("sigma singular at t=0"), std::string::npos) << r.failure_message();
  expect_error([&] { require_usable(r); }, "model", "sigma singular");
}

TEST(Model, RunningRewardBoundReported) {
  GameSpec s = simple();
  s.running_reward = [](double, const Vector&, const Vector&) { return 2.0; };
  const ValidationReport r = validate_spec(s, 10, 3);
  EXPECT_FALSE(r.usable());
  EXPECT_NE(r.failure_message().find("running reward exceeds bound, measured 2 vs 1"), std::string::npos)
      << r.failure_message();
}

TEST(Model, NonFiniteAndShapeErrors) {
  GameSpec s = simple();
  s.terminal_reward = [](const Vector&) { return std::nan(""); };
  EXPECT_FALSE(validate_spec(s, 4, 1).usable());

  GameSpec t = simple();
  t.actions.clear();
  EXPECT_FALSE(validate_spec(t, 4, 1).usable());

  expect_error([&] { validate_spec(simple(), 0, 1); }, "model", "probes");
}

TEST(Model, ValidationIsDeterministic) {
  const GameSpec s = builtin("bang-bang-1d");
  const ValidationReport a = validate_spec(s, 50, 11), b = validate_spec(s, 50, 11);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].measured, b.checks[i].measured);
    EXPECT_EQ(a.checks[i].name, b.checks[i].name);
  }
}

TEST(Model, StateBoxContains) {
  const StateBox box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  EXPECT_TRUE(box.contains(Vector::Zero(2)));
  EXPECT_TRUE(box.contains(Vector::Constant(2, 1.0)));
  EXPECT_FALSE(box.contains(Vector::Constant(2, 1.5)));
}

TEST(SpecJson, AffineAndTabulatedFamilies) {
  const GameSpec s = spec_from_json(affine_doc());
  EXPECT_EQ(s.name, "affine");
  ASSERT_EQ(s.action_count(), 2u);
  const Vector x = Vector::Constant(1, 1.0), a = Vector::Constant(1, 0.5);
  EXPECT_DOUBLE_EQ(s.drift(0.3, x, a)(0), 0.6);
  EXPECT_DOUBLE_EQ(s.running_reward(0.0, x, a), 0.3);
  EXPECT_DOUBLE_EQ(s.terminal_reward(Vector::Constant(1, 0.5)), 1.0);
  EXPECT_DOUBLE_EQ(s.terminal_reward(Vector::Constant(1, -0.5)), 0.5);
  EXPECT_DOUBLE_EQ(s.terminal_reward(Vector::Constant(1, 5.0)), 2.0);  // flat outside the table
  EXPECT_DOUBLE_EQ(s.terminal_reward(Vector::Constant(1, -5.0)), 1.0);
  EXPECT_TRUE(validate_spec(s, 20, 1).usable());
}

TEST(SpecJson, Errors) {
  auto doc = affine_doc();
  doc.erase("horizon");
  expect_error([&] { spec_from_json(doc); }, "model", "horizon");

  doc = affine_doc();
  doc["sigma"] = {{"type", "spline"}};
  expect_error([&] { spec_from_json(doc); }, "model", "spline");

  doc = affine_doc();
  doc["terminal_reward"]["values"] = {1.0, 2.0};
  expect_error([&] { spec_from_json(doc); }, "model", "spec JSON");

  expect_error([] { load_spec_file("/nonexistent/spec.json"); }, "model", "cannot open");
}
