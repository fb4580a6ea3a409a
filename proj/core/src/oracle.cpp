#include "sdgame/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <unordered_map>

#include "sdgame/error.hpp"

namespace sdgame {

namespace {

struct Edge {
  std::uint32_t local;
  double prob;
};

struct LocalNode {
  int slice = 0;
  NodeId node = 0;
  bool decision = false;
  bool stoppable = false;
  double g = 0.0;
  double end_value = 0.0;
  std::vector<double> hdt;               // per action
  std::vector<std::vector<Edge>> succ;   // per action
};

/// Nodes reachable from a start node under any action, up to `end_slice`.
/// Decision nodes carry per-action kernels in local indexing.
class DecisionGraph {
 public:
  DecisionGraph(const Lattice& lattice, int start_slice, NodeId start_node, int end_slice,
                std::span<const double> end_values, int earliest_stop)
      : actions_(lattice.action_count()) {
    if (start_slice < 0 || start_slice > end_slice || end_slice > lattice.steps()) {
      throw Error("oracle", "invalid slice window");
    }
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    auto key = [&](int s, NodeId n) { return (static_cast<std::uint64_t>(s) << 32) | n; };
    auto intern = [&](int s, NodeId n) {
      auto [it, inserted] = index.emplace(key(s, n), static_cast<std::uint32_t>(nodes_.size()));
      if (inserted) {
        LocalNode ln;
        ln.slice = s;
        ln.node = n;
        ln.g = lattice.terminal_reward(n);
        nodes_.push_back(std::move(ln));
      }
      return it->second;
    };
    intern(start_slice, start_node);
    // nodes_ grows in slice order because every edge points one slice ahead
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int s = nodes_[i].slice;
      const NodeId n = nodes_[i].node;
      if (s == end_slice) {
        nodes_[i].end_value = end_values[n];
        continue;
      }
      nodes_[i].decision = true;
      nodes_[i].stoppable = s >= earliest_stop;
      std::vector<double> hdt(actions_);
      std::vector<std::vector<Edge>> succ(actions_);
      for (std::size_t a = 0; a < actions_; ++a) {
        hdt[a] = lattice.running_reward(s, n, a) * lattice.dt();
        for (const Outcome& o : lattice.transition(s, n, a)) {
          if (o.prob > 0.0) succ[a].push_back(Edge{intern(s + 1, o.node), o.prob});
        }
      }
      nodes_[i].hdt = std::move(hdt);
      nodes_[i].succ = std::move(succ);
    }
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].decision) continue;
      decision_.push_back(i);
      if (nodes_[i].stoppable) stoppable_.push_back(i);
    }
    slot_.assign(nodes_.size(), 0);
    stop_slot_.assign(nodes_.size(), -1);
    for (std::size_t k = 0; k < decision_.size(); ++k) slot_[decision_[k]] = static_cast<std::uint32_t>(k);
    for (std::size_t k = 0; k < stoppable_.size(); ++k) stop_slot_[stoppable_[k]] = static_cast<int>(k);
    values_.assign(nodes_.size(), 0.0);
  }

  std::size_t decision_count() const { return decision_.size(); }
  std::size_t stoppable_count() const { return stoppable_.size(); }
  std::size_t actions() const { return actions_; }
  const LocalNode& decision_node(std::size_t k) const { return nodes_[decision_[k]]; }
  const LocalNode& stoppable_node(std::size_t k) const { return nodes_[stoppable_[k]]; }

  /// Root payoff for policy digits (one per decision node) and a stop mask
  /// (bit k for stoppable node k).
  double evaluate(const std::vector<std::uint32_t>& digits, const std::vector<std::uint8_t>& stop) const {
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      const LocalNode& ln = nodes_[i];
      if (!ln.decision) {
        values_[i] = ln.end_value;
        continue;
      }
      if (ln.stoppable && stop[static_cast<std::size_t>(stop_slot_[i])]) {
        values_[i] = ln.g;
        continue;
      }
      const std::uint32_t a = digits[slot_[i]];
      double acc = ln.hdt[a];
      for (const Edge& e : ln.succ[a]) acc += e.prob * values_[e.local];
      values_[i] = acc;
    }
    return values_[0];
  }

  std::vector<std::uint32_t> digits_from(const Policy& u) const {
    std::vector<std::uint32_t> d(decision_.size());
    for (std::size_t k = 0; k < decision_.size(); ++k) {
      d[k] = static_cast<std::uint32_t>(u(nodes_[decision_[k]].slice, nodes_[decision_[k]].node));
    }
    return d;
  }

  std::vector<std::uint8_t> mask_from(const StoppingRule& tau) const {
    std::vector<std::uint8_t> m(stoppable_.size());
    for (std::size_t k = 0; k < stoppable_.size(); ++k) {
      m[k] = tau.stops(nodes_[stoppable_[k]].slice, nodes_[stoppable_[k]].node) ? 1 : 0;
    }
    return m;
  }

 private:
  std::size_t actions_;
  std::vector<LocalNode> nodes_;
  std::vector<std::uint32_t> decision_;
  std::vector<std::uint32_t> stoppable_;
  std::vector<std::uint32_t> slot_;
  std::vector<int> stop_slot_;
  mutable std::vector<double> values_;
};

std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t limit) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > limit / base) return limit + 1;
    out *= base;
  }
  return out;
}

bool next_digits(std::vector<std::uint32_t>& digits, std::size_t radix) {
  for (auto& d : digits) {
    if (++d < radix) return true;
    d = 0;
  }
  return false;
}

void mask_from_index(std::uint64_t index, std::vector<std::uint8_t>& mask) {
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = (index >> k) & 1U;
}

std::string budget_message(const char* what, std::uint64_t needed, std::uint64_t cap) {
  return std::string(what) + " enumeration needs " +
         (needed == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64") : std::to_string(needed)) +
         " evaluations, cap is " + std::to_string(cap);
}

std::uint64_t safe_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

nlohmann::json to_json(const EnumerationResult& r) {
  return nlohmann::json{{"upper_value", r.upper},
                        {"lower_value", r.lower},
                        {"decision_nodes", r.decision_nodes},
                        {"policy_count", r.policy_count},
                        {"rule_count", r.rule_count},
                        {"pair_count", r.pair_count},
                        {"best_rule_stop_count", r.best_rule.stop_count()}};
}

EnumerationResult enumerate_values(const Lattice& lattice, const OracleOptions& options) {
  std::vector<double> g(lattice.node_count());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = lattice.terminal_reward(static_cast<NodeId>(n));
  DecisionGraph graph(lattice, 0, lattice.root(), lattice.steps(), g, 0);

  const std::uint64_t cap = options.max_pair_evaluations;
  const std::uint64_t policies = checked_power(graph.actions(), graph.decision_count(), cap);
  const std::uint64_t rules = checked_power(2, graph.stoppable_count(), cap);
  const std::uint64_t pairs = safe_mul(policies, rules);
  if (policies > options.max_policies || rules > options.max_rules || pairs > cap) {
    throw Error("oracle", budget_message("value", pairs, cap) + " (" + std::to_string(graph.decision_count()) +
                              " decision nodes, " + std::to_string(graph.actions()) + " actions)");
  }

  EnumerationResult result;
  result.decision_nodes = graph.decision_count();
  result.policy_count = policies;
  result.rule_count = rules;
  result.pair_count = pairs;
  if (options.keep_table) result.payoff_table.reserve(pairs);

  std::vector<double> rule_min(rules, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> digits(graph.decision_count(), 0);
  std::vector<std::uint8_t> mask(graph.stoppable_count(), 0);
  double upper = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> best_digits = digits;
  std::uint64_t p = 0;
  do {
    double policy_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t r = 0; r < rules; ++r) {
      mask_from_index(r, mask);
      const double v = graph.evaluate(digits, mask);
      if (options.keep_table) result.payoff_table.push_back(v);
      policy_max = std::max(policy_max, v);
      rule_min[r] = std::min(rule_min[r], v);
    }
    if (policy_max < upper) {
      upper = policy_max;
      best_digits = digits;
    }
    ++p;
  } while (next_digits(digits, graph.actions()));

  std::uint64_t best_r = 0;
  for (std::uint64_t r = 1; r < rules; ++r) {
    if (rule_min[r] > rule_min[best_r]) best_r = r;
  }
  result.upper = upper;
  result.lower = rule_min[best_r];

  result.best_policy = Policy(lattice, 0);
  for (std::size_t k = 0; k < graph.decision_count(); ++k) {
    const LocalNode& ln = graph.decision_node(k);
    result.best_policy.set(ln.slice, ln.node, best_digits[k]);
  }
  result.best_rule = StoppingRule(lattice, false);
  mask_from_index(best_r, mask);
  for (std::size_t k = 0; k < graph.stoppable_count(); ++k) {
    const LocalNode& ln = graph.stoppable_node(k);
    result.best_rule.set(ln.slice, ln.node, mask[k] != 0);
  }
  return result;
}

SaddleCheckResult enumerate_saddle_check(const Lattice& lattice, const Policy& u_star, const StoppingRule& tau_star,
                                         double tol, const OracleOptions& options) {
  u_star.require_valid(lattice, "oracle");
  tau_star.require_valid(lattice, "oracle");
  std::vector<double> g(lattice.node_count());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = lattice.terminal_reward(static_cast<NodeId>(n));
  DecisionGraph graph(lattice, 0, lattice.root(), lattice.steps(), g, 0);

  const std::uint64_t rules = checked_power(2, graph.stoppable_count(), options.max_rules);
  const std::uint64_t policies = checked_power(graph.actions(), graph.decision_count(), options.max_policies);
  if (rules > options.max_rules) throw Error("oracle", budget_message("stopping-rule", rules, options.max_rules));
  if (policies > options.max_policies) throw Error("oracle", budget_message("policy", policies, options.max_policies));

  const auto star_digits = graph.digits_from(u_star);
  const auto star_mask = graph.mask_from(tau_star);
  SaddleCheckResult out;
  out.middle = graph.evaluate(star_digits, star_mask);

  // worst alternative on each side, preferring the fewest deviations among equally bad ones
  double best_left = -std::numeric_limits<double>::infinity();
  std::size_t left_diff = 0;
  std::vector<std::uint8_t> left_mask = star_mask;
  std::vector<std::uint8_t> mask(graph.stoppable_count(), 0);
  for (std::uint64_t r = 0; r < rules; ++r) {
    mask_from_index(r, mask);
    const double gain = graph.evaluate(star_digits, mask) - out.middle;
    std::size_t diff = 0;
    for (std::size_t k = 0; k < mask.size(); ++k) diff += mask[k] != star_mask[k];
    if (gain > best_left + 1e-12 || (std::abs(gain - best_left) <= 1e-12 && diff < left_diff)) {
      best_left = std::max(gain, best_left);
      left_diff = diff;
      left_mask = mask;
    }
  }
  out.rules_checked = rules;

  double best_right = -std::numeric_limits<double>::infinity();
  std::size_t right_diff = 0;
  std::vector<std::uint32_t> right_digits = star_digits;
  std::vector<std::uint32_t> digits(graph.decision_count(), 0);
  do {
    const double gain = out.middle - graph.evaluate(digits, star_mask);
    std::size_t diff = 0;
    for (std::size_t k = 0; k < digits.size(); ++k) diff += digits[k] != star_digits[k];
    if (gain > best_right + 1e-12 || (std::abs(gain - best_right) <= 1e-12 && diff < right_diff)) {
      best_right = std::max(gain, best_right);
      right_diff = diff;
      right_digits = digits;
    }
  } while (next_digits(digits, graph.actions()));
  out.policies_checked = policies;

  out.max_stopper_gain = best_left;
  out.max_controller_gain = best_right;
  out.pass = best_left <= tol && best_right <= tol;
  if (!out.pass) {
    if (best_left >= best_right) {
      out.worst.side = SaddleViolation::Side::stopper;
      out.worst.gap = best_left;
      for (std::size_t k = 0; k < left_mask.size(); ++k) {
        if (left_mask[k] != star_mask[k]) out.worst.deviations.emplace_back(graph.stoppable_node(k).slice, graph.stoppable_node(k).node);
      }
    } else {
      out.worst.side = SaddleViolation::Side::controller;
      out.worst.gap = best_right;
      for (std::size_t k = 0; k < right_digits.size(); ++k) {
        if (right_digits[k] != star_digits[k]) out.worst.deviations.emplace_back(graph.decision_node(k).slice, graph.decision_node(k).node);
      }
    }
  }
  return out;
}

SubgameValues enumerate_subgame(const Lattice& lattice, int start_slice, NodeId start_node, int earliest_stop,
                                std::span<const double> theta_values, const OracleOptions& options) {
  if (earliest_stop < start_slice || earliest_stop > lattice.steps()) throw Error("oracle", "earliest stop slice out of range");
  const std::uint64_t cap = options.max_pair_evaluations;
  SubgameValues out;

  DecisionGraph horizon(lattice, start_slice, start_node, earliest_stop, theta_values, earliest_stop);
  const std::uint64_t hp = checked_power(horizon.actions(), horizon.decision_count(), cap);
  if (hp > cap) throw Error("oracle", budget_message("horizon", hp, cap));
  {
    std::vector<std::uint32_t> digits(horizon.decision_count(), 0);
    const std::vector<std::uint8_t> none;
    out.horizon_min = std::numeric_limits<double>::infinity();
    do {
      out.horizon_min = std::min(out.horizon_min, horizon.evaluate(digits, none));
    } while (next_digits(digits, horizon.actions()));
  }

  std::vector<double> g(lattice.node_count());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = lattice.terminal_reward(static_cast<NodeId>(n));
  DecisionGraph game(lattice, start_slice, start_node, lattice.steps(), g, earliest_stop);
  const std::uint64_t policies = checked_power(game.actions(), game.decision_count(), cap);
  const std::uint64_t rules = checked_power(2, game.stoppable_count(), cap);
  const std::uint64_t pairs = safe_mul(policies, rules);
  if (pairs > cap) throw Error("oracle", budget_message("subgame", pairs, cap));

  std::vector<double> rule_min(rules, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> digits(game.decision_count(), 0);
  std::vector<std::uint8_t> mask(game.stoppable_count(), 0);
  out.upper = std::numeric_limits<double>::infinity();
  do {
    double policy_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t r = 0; r < rules; ++r) {
      mask_from_index(r, mask);
      const double v = game.evaluate(digits, mask);
      policy_max = std::max(policy_max, v);
      rule_min[r] = std::min(rule_min[r], v);
    }
    out.upper = std::min(out.upper, policy_max);
  } while (next_digits(digits, game.actions()));
  out.lower = *std::max_element(rule_min.begin(), rule_min.end());
  return out;
}

void write_payoff_csv(std::ostream& out, const EnumerationResult& result) {
  if (result.payoff_table.size() != result.pair_count) {
    throw Error("oracle", "payoff table was not kept; enumerate with keep_table");
  }
  out << "policy,rule,payoff\n" << std::setprecision(17);
  for (std::uint64_t p = 0; p < result.policy_count; ++p) {
    for (std::uint64_t r = 0; r < result.rule_count; ++r) {
      out << p << ',' << r << ',' << result.payoff_table[p * result.rule_count + r] << '\n';
    }
  }
}

}  // namespace sdgame
