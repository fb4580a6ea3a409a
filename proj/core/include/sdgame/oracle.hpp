#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

namespace sdgame {

/// Hard caps; the oracle refuses instead of sampling.
struct OracleOptions {
  std::uint64_t max_pair_evaluations = std::uint64_t{1} << 20;
  std::uint64_t max_rules = std::uint64_t{1} << 20;
  std::uint64_t max_policies = std::uint64_t{1} << 20;
  bool keep_table = false;
};

/// Exhaustive ground truth over Markov policies and Markov stop regions
/// restricted to the decision nodes reachable from the root (only those
/// influence the root payoff).
struct EnumerationResult {
  double upper = 0.0;  // min over policies of max over rules
  double lower = 0.0;  // max over rules of min over policies
  Policy best_policy;
  StoppingRule best_rule;
  std::size_t decision_nodes = 0;
  std::uint64_t policy_count = 0;
  std::uint64_t rule_count = 0;
  std::uint64_t pair_count = 0;
  std::vector<double> payoff_table;  // policy-major, filled when keep_table
};

nlohmann::json to_json(const EnumerationResult& result);

EnumerationResult enumerate_values(const Lattice& lattice, const OracleOptions& options = {});

struct SaddleViolation {
  enum class Side { none, stopper, controller };
  Side side = Side::none;
  double gap = 0.0;
  /// (slice, node) entries where the worst alternative deviates from the
  /// tested pair; the smallest such set among equally bad alternatives.
  std::vector<std::pair<int, NodeId>> deviations;
};

struct SaddleCheckResult {
  bool pass = true;
  double middle = 0.0;  // E^{u*}[Y(tau*)]
  double max_stopper_gain = 0.0;     // max over tau of E^{u*}[Y(tau)] - middle
  double max_controller_gain = 0.0;  // max over u of middle - E^u[Y(tau*)]
  SaddleViolation worst;
  std::uint64_t rules_checked = 0;
  std::uint64_t policies_checked = 0;
};

/// Checks E^{u*}[Y(tau)] <= E^{u*}[Y(tau*)] <= E^u[Y(tau*)] against every
/// enumerated tau and u within `tol`.
SaddleCheckResult enumerate_saddle_check(const Lattice& lattice, const Policy& u_star, const StoppingRule& tau_star,
                                         double tol = 1e-10, const OracleOptions& options = {});

/// Values of the game started at (start_slice, start_node) when stopping is
/// only allowed from `earliest_stop` on:
///   horizon_min = min over policies of E^u[V(theta) + sum h dt], theta = earliest_stop,
///                 with `theta_values` supplying V(theta, .)
///   lower       = max over rules >= theta of min over policies of E^u[Y(t, tau)]
///   upper       = min over policies of max over rules >= theta of E^u[Y(t, tau)]
struct SubgameValues {
  double horizon_min = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

SubgameValues enumerate_subgame(const Lattice& lattice, int start_slice, NodeId start_node, int earliest_stop,
                                std::span<const double> theta_values, const OracleOptions& options = {});

/// CSV payoff matrix: policy,rule,payoff. Requires a result with keep_table.
void write_payoff_csv(std::ostream& out, const EnumerationResult& result);

}  // namespace sdgame
