#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sdgame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using VolatilityFn = std::function<Matrix(double t, const Vector& x)>;
using DriftFn = std::function<Vector(double t, const Vector& x, const Vector& a)>;
using RunningRewardFn = std::function<double(double t, const Vector& x, const Vector& a)>;
using TerminalRewardFn = std::function<double(const Vector& x)>;

/// Per-coordinate truncation bounds of the state lattice.
struct StateBox {
  Vector lower;
  Vector upper;

  bool contains(const Vector& x) const;
};

/// Problem statement of a controller-vs-stopper game with Markovian
/// coefficients. The controller picks drift actions from a finite set and
/// pays the stopper g(X(tau)) plus the accumulated running reward h.
///
/// Coefficient callables must be pure; a GameSpec is shared read-only by
/// every downstream object.
struct GameSpec {
  std::string name;
  int dim = 1;
  double horizon = 1.0;
  Vector initial_state;
  std::vector<Vector> actions;
  VolatilityFn sigma;
  DriftFn drift;
  RunningRewardFn running_reward;
  TerminalRewardFn terminal_reward;
  double bound_K = 1.0;
  StateBox state_box;

  std::size_t action_count() const { return actions.size(); }
};

/// Index of `a` in the spec's action set, matched coordinate-wise within
/// 1e-12; nullopt when absent.
std::optional<std::size_t> find_action(const GameSpec& spec, const Vector& a);

/// Same as find_action but throws sdgame::Error naming the action.
std::size_t require_action(const GameSpec& spec, const Vector& a);

struct Coefficients {
  Vector drift;
  Matrix vol;
  double reward = 0.0;
};

/// f(t,x,a), sigma(t,x) and h(t,x,a) in one call. Throws when `a` is not an
/// element of the action set or t lies outside [0, T].
Coefficients evaluate_coefficients(const GameSpec& spec, double t, const Vector& x,
                                   const Vector& a);

struct ProbePoint {
  double t = 0.0;
  Vector x;
  std::size_t action = 0;
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  double measured = 0.0;  // worst observed value of the checked quantity
  double bound = 0.0;     // admissible limit (bound_K based where relevant)
  std::optional<ProbePoint> worst;
  std::string message;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  int probes = 0;
  std::uint64_t seed = 0;

  bool usable() const;
  /// First failing message, empty when usable.
  std::string failure_message() const;
};

/// Probes the boundedness and nonsingularity assumptions at `probes` random
/// points of [0,T] x state_box (every action at each point). The first probe
/// is always (0, initial_state). Deterministic in (spec, probes, seed).
ValidationReport validate_spec(const GameSpec& spec, int probes, std::uint64_t seed);

/// Throws sdgame::Error("model", ...) when the report is not usable.
void require_usable(const ValidationReport& report);

}  // namespace sdgame
