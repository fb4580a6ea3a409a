#pragma once

// Test-side reference computations that share no code with the solvers.
// Everything here is one-dimensional and deliberately naive: kernels are
// rebuilt from the spec coefficients and expectations are plain recursions
// over the path tree, so agreement with the library is evidence rather than
// tautology.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "sdgame/model.hpp"

namespace sdtest {

using PolicyFn = std::function<std::size_t(int slice, int index)>;
using StopFn = std::function<bool(int slice, int index)>;

class PathTree {
 public:
  PathTree(const sdgame::GameSpec& spec, int steps, int nodes);

  int steps() const { return steps_; }
  int nodes() const { return nodes_; }
  int root() const { return root_; }
  double dt() const { return dt_; }
  double dx() const { return dx_; }
  double x(int index) const { return lo_ + dx_ * index; }
  double g(int index) const;

  /// (index, probability) pairs of the one-step kernel, boundary mass kept in place.
  std::vector<std::pair<int, double>> kernel(int slice, int index, std::size_t action) const;
  double h(int slice, int index, std::size_t action) const;

  /// max(g, min_a E[h dt + V(next)]) by unmemoized recursion.
  double game_value(int slice, int index) const;
  /// max(g, E^u[h dt + Z(next)]).
  double snell_value(const PolicyFn& u, int slice, int index) const;
  /// E^u[g(X_tau) + sum h dt] with tau the first stop of `stop` (terminal always stops).
  double payoff(const PolicyFn& u, const StopFn& stop, int slice, int index) const;
  /// E^u[f(X_to) + sum_{s<to} h dt]; u == nullptr minimizes over actions at every step.
  double horizon(const PolicyFn* u, const std::function<double(int)>& f, int to, int slice, int index) const;

  /// Sum over paths of prob * payoff, enumerating every path explicitly.
  double payoff_by_paths(const PolicyFn& u, const StopFn& stop) const;

 private:
  const sdgame::GameSpec& spec_;
  int steps_, nodes_, root_;
  double dt_, dx_, lo_;
};

/// E^u[g(X_tau) + sum h dt] for the Gaussian Euler scheme X' = X + f dt + sigma sqrt(dt) Z,
/// with policy and stop rule read at the nearest grid node (clamped), evaluated by
/// nested piecewise Gauss-Legendre quadrature split at nodes and node midpoints.
double euler_quadrature(const sdgame::GameSpec& spec, int steps, int nodes, const PolicyFn& u, const StopFn& stop,
                        int points_per_piece = 12, double width_sd = 8.0);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace sdtest
