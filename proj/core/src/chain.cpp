#include "sdgame/chain.hpp"

#include <algorithm>
#include <limits>

#include "sdgame/error.hpp"

namespace sdgame::chain {

SliceTable<double> stopped_payoff(const Lattice& lattice, const Policy& u, const StoppingRule& tau) {
  u.require_valid(lattice, "certify");
  tau.require_valid(lattice, "certify");
  const int T = lattice.steps();
  SliceTable<double> w(lattice.slices(), lattice.node_count());
  for (std::size_t n = 0; n < lattice.node_count(); ++n) w(T, static_cast<NodeId>(n)) = lattice.terminal_reward(static_cast<NodeId>(n));
  for (int s = T - 1; s >= 0; --s) {
    auto next = w.row(s + 1);
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      w(s, node) = tau.stops(s, node) ? lattice.terminal_reward(node) : lattice.continuation(s, node, u(s, node), next);
    }
  }
  return w;
}

SliceTable<double> horizon_expectation(const Lattice& lattice, int to_slice, std::span<const double> terminal_row,
                                       const Policy* policy, const StoppingRule* stop,
                                       const SliceTable<double>* stop_values) {
  if (to_slice < 0 || to_slice > lattice.steps()) throw Error("certify", "horizon slice out of range");
  if (terminal_row.size() != lattice.node_count()) throw Error("certify", "terminal row has wrong length");
  if (stop && !stop_values) throw Error("certify", "stop rule given without stop values");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SliceTable<double> w(lattice.slices(), lattice.node_count(), nan);
  std::copy(terminal_row.begin(), terminal_row.end(), w.row(to_slice).begin());
  for (int s = to_slice - 1; s >= 0; --s) {
    auto next = w.row(s + 1);
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (stop && stop->stops(s, node)) {
        w(s, node) = (*stop_values)(s, node);
        continue;
      }
      if (policy) {
        w(s, node) = lattice.continuation(s, node, (*policy)(s, node), next);
      } else {
        double best = lattice.continuation(s, node, 0, next);
        for (std::size_t a = 1; a < lattice.action_count(); ++a) best = std::min(best, lattice.continuation(s, node, a, next));
        w(s, node) = best;
      }
    }
  }
  return w;
}

SliceTable<std::uint8_t> reached(const Lattice& lattice, const Policy* policy, const StoppingRule* rule,
                                 int start_slice, NodeId start_node) {
  SliceTable<std::uint8_t> seen(lattice.slices(), lattice.node_count(), 0);
  seen(start_slice, start_node) = 1;
  for (int s = start_slice; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (!seen(s, node) || (rule && rule->stops(s, node))) continue;
      auto expand = [&](std::size_t a) {
        for (const Outcome& o : lattice.transition(s, node, a)) {
          if (o.prob > 0.0) seen(s + 1, o.node) = 1;
        }
      };
      if (policy) {
        expand((*policy)(s, node));
      } else {
        for (std::size_t a = 0; a < lattice.action_count(); ++a) expand(a);
      }
    }
  }
  return seen;
}

SliceTable<int> earliest_stop(const Lattice& lattice, const StoppingRule& rule) {
  const int T = lattice.steps();
  SliceTable<int> e(lattice.slices(), lattice.node_count(), T);
  for (int s = T - 1; s >= 0; --s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (rule.stops(s, node)) {
        e(s, node) = s;
        continue;
      }
      int best = T;
      for (std::size_t a = 0; a < lattice.action_count(); ++a) {
        for (const Outcome& o : lattice.transition(s, node, a)) {
          if (o.prob > 0.0) best = std::min(best, e(s + 1, o.node));
        }
      }
      e(s, node) = best;
    }
  }
  return e;
}

}  // namespace sdgame::chain
