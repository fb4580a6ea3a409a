#include "sdgame/snell.hpp"

#include <algorithm>
#include <iomanip>

#include "sdgame/error.hpp"

namespace sdgame {

SnellField snell_solve(const Lattice& lattice, const Policy& u) {
  u.require_valid(lattice, "snell");
  const int T = lattice.steps();
  SnellField field{SliceTable<double>(lattice.slices(), lattice.node_count()), u};
  for (std::size_t n = 0; n < lattice.node_count(); ++n) {
    field.Z(T, static_cast<NodeId>(n)) = lattice.terminal_reward(static_cast<NodeId>(n));
  }
  for (int s = T - 1; s >= 0; --s) {
    auto next = field.Z.row(s + 1);
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      field.Z(s, node) = std::max(lattice.terminal_reward(node), lattice.continuation(s, node, u(s, node), next));
    }
  }
  return field;
}

StoppingRule epsilon_stop_rule(const SnellField& field, const Lattice& lattice, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error("snell", "eps must lie in [0, 1)");
  if (field.Z.slices() != lattice.slices() || field.Z.nodes() != lattice.node_count()) {
    throw Error("snell", "field was not solved on this lattice");
  }
  StoppingRule rule(lattice, false);
  for (int s = 0; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      rule.set(s, node, lattice.terminal_reward(node) >= field.Z(s, node) - eps);
    }
  }
  return rule;
}

double snell_drift(const SnellField& field, const Lattice& lattice, const Policy& u, int slice, NodeId node) {
  if (slice < 0 || slice >= lattice.steps()) throw Error("snell", "drift needs a non-terminal slice");
  return lattice.continuation(slice, node, u(slice, node), field.Z.row(slice + 1)) - field.Z(slice, node);
}

void write_snell_csv(std::ostream& out, const SnellField& field, const Lattice& lattice) {
  out << "slice";
  for (int i = 0; i < lattice.dim(); ++i) out << ",x" << i;
  out << ",Z,g,drift\n";
  out << std::setprecision(17);
  for (int s = 0; s < lattice.slices(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      out << s;
      const Vector x = lattice.coordinates(node);
      for (int i = 0; i < lattice.dim(); ++i) out << ',' << x[i];
      out << ',' << field.Z(s, node) << ',' << lattice.terminal_reward(node) << ',';
      if (s < lattice.steps()) out << snell_drift(field, lattice, field.policy, s, node);
      out << '\n';
    }
  }
}

}  // namespace sdgame
