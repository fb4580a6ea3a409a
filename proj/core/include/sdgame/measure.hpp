#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

namespace sdgame {

enum class PathMode { reference, controlled };
enum class PayoffMode { reweight, direct };
/// `zero` forces every Brownian increment to 0; used to test the Euler recursion.
enum class NoiseKind { gaussian, zero };

const char* to_string(PathMode mode);
const char* to_string(PayoffMode mode);

struct SimulationOptions {
  NoiseKind noise = NoiseKind::gaussian;
  int threads = 1;
};

/// Euler-Maruyama paths on the lattice time grid. Path i draws its increments
/// from its own stream keyed by (seed, i), so the reference and controlled
/// modes see bit-identical noise for the same seed.
struct PathBundle {
  std::size_t count = 0;
  int steps = 0;
  int dim = 0;
  double dt = 0.0;
  std::vector<double> times;
  PathMode mode = PathMode::reference;
  std::optional<Policy> policy;
  std::uint64_t seed = 0;
  std::vector<double> states;  // count x (steps+1) x dim
  std::vector<double> noise;   // count x steps x dim

  std::span<const double> state(std::size_t path, int slice) const;
  std::span<const double> increment(std::size_t path, int slice) const;
};

/// Per-path exponential likelihood ratio on the time grid.
struct LikelihoodPath {
  std::size_t count = 0;
  int steps = 0;
  std::vector<double> values;  // count x (steps+1), values[.,0] == 1

  double at(std::size_t path, int slice) const { return values[path * (steps + 1) + slice]; }
  /// Lambda(from, to) = Lambda(to) / Lambda(from).
  double between(std::size_t path, int from, int to) const { return at(path, to) / at(path, from); }
};

struct Estimate {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t n_paths = 0;
  std::string mode;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const Estimate& e);

/// Reference mode: X(t+dt) = X + sigma(t,X) dW. Controlled mode adds
/// f(t, X, u(t, node(X))) dt, the node being the nearest lattice node.
PathBundle simulate(const Lattice& lattice, PathMode mode, const Policy* u, std::size_t n_paths, std::uint64_t seed,
                    const SimulationOptions& options = {});

/// Lambda(t+dt) = Lambda(t) exp(<phi, dW> - |phi|^2 dt / 2), phi = sigma^{-1} f(t, X, u(t, X)),
/// along reference-mode paths.
LikelihoodPath likelihood_ratio(const PathBundle& bundle, const Lattice& lattice, const Policy& u);

/// Monte-Carlo estimate of E^u[g(X(tau)) + sum_{s < tau} h dt]. tau is read
/// off the nearest lattice node at each slice. Reweight mode weights
/// reference paths by Lambda(tau); direct mode simulates the controlled SDE.
Estimate expected_payoff(const Lattice& lattice, const Policy& u, const StoppingRule& tau, PayoffMode mode,
                         std::size_t n_paths, std::uint64_t seed, const SimulationOptions& options = {});

/// Sample mean and standard error of Lambda^u(T) over reference paths.
Estimate terminal_likelihood_mean(const Lattice& lattice, const Policy& u, std::size_t n_paths, std::uint64_t seed,
                                  const SimulationOptions& options = {});

struct StrategyChangeReport {
  int theta_slice = 0;
  double clamp = 0.0;
  Estimate under_u;
  Estimate under_v;
  double difference = 0.0;
  double combined_se = 0.0;
  bool agree = false;
};

/// For u == v on slices [0, theta), estimates E^u[Xi] and E^v[Xi] with
/// Xi = clamp(g(X(theta))), both by weighting common reference paths with
/// the full-horizon ratio Lambda(T). Throws when the policies differ on the
/// agreement window.
StrategyChangeReport conditional_change_of_strategy_check(const Lattice& lattice, const Policy& u, const Policy& v,
                                                          int theta_slice, std::size_t n_paths, std::uint64_t seed,
                                                          double clamp = 10.0, const SimulationOptions& options = {});

/// Per-path CSV: path,slice,t,x0..,dW0.. (dW empty on the last slice).
void write_paths_csv(std::ostream& out, const PathBundle& bundle);

/// Order-stable pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace sdgame
