#include "sdgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "sdgame/chain.hpp"
#include "sdgame/error.hpp"

namespace sdgame {

Vector ValueField::gamma_at(int slice, NodeId node, int dim) const {
  const std::size_t base = (static_cast<std::size_t>(slice) * V.nodes() + node) * static_cast<std::size_t>(dim);
  return Eigen::Map<const Vector>(gamma.data() + base, dim);
}

ValueField solve_game(const Lattice& lattice) {
  const int T = lattice.steps();
  const std::size_t nodes = lattice.node_count();
  ValueField field{SliceTable<double>(lattice.slices(), nodes), Policy(lattice, 0), StoppingRule(lattice, false), {}};
  for (std::size_t n = 0; n < nodes; ++n) field.V(T, static_cast<NodeId>(n)) = lattice.terminal_reward(static_cast<NodeId>(n));

  for (int s = T - 1; s >= 0; --s) {
    auto next = field.V.row(s + 1);
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto node = static_cast<NodeId>(n);
      std::size_t best_action = 0;
      double best = lattice.continuation(s, node, 0, next);
      for (std::size_t a = 1; a < lattice.action_count(); ++a) {
        const double c = lattice.continuation(s, node, a, next);
        if (c < best) {
          best = c;
          best_action = a;
        }
      }
      field.ustar.set(s, node, best_action);
      field.V(s, node) = std::max(lattice.terminal_reward(node), best);
    }
  }

  field.rho0 = rho_rule(field, lattice, 0.0);
  const int dim = lattice.dim();
  field.gamma.assign(static_cast<std::size_t>(lattice.slices()) * nodes * static_cast<std::size_t>(dim), 0.0);
  for (int s = 0; s < T; ++s) {
    for (std::size_t n = 0; n < nodes; ++n) {
      const Vector g = adjoint_gamma(field, lattice, s, static_cast<NodeId>(n));
      std::copy(g.data(), g.data() + dim, field.gamma.begin() + static_cast<std::ptrdiff_t>((s * nodes + n) * dim));
    }
  }
  return field;
}

double hamiltonian(const GameSpec& spec, double t, const Vector& x, const Vector& a, const Vector& p) {
  const Matrix sig = spec.sigma(t, x);
  Eigen::FullPivLU<Matrix> lu(sig);
  if (!lu.isInvertible()) throw Error("game", "sigma singular in hamiltonian");
  const Vector phi = lu.solve(spec.drift(t, x, a));
  return p.dot(phi) + spec.running_reward(t, x, a);
}

std::size_t hamiltonian_selector(const GameSpec& spec, double t, const Vector& x, const Vector& p) {
  std::size_t best_action = 0;
  double best = hamiltonian(spec, t, x, spec.actions[0], p);
  for (std::size_t a = 1; a < spec.actions.size(); ++a) {
    const double value = hamiltonian(spec, t, x, spec.actions[a], p);
    if (value < best) {
      best = value;
      best_action = a;
    }
  }
  return best_action;
}

Vector adjoint_gamma(const ValueField& field, const Lattice& lattice, int slice, NodeId node) {
  if (slice < 0 || slice >= lattice.steps()) throw Error("game", "adjoint_gamma needs a non-terminal slice");
  const int dim = lattice.dim();
  if (field.rho0.stops(slice, node)) return Vector::Zero(dim);
  Vector grad(dim);
  for (int i = 0; i < dim; ++i) {
    const auto lo = lattice.neighbor(node, i, -1);
    const auto hi = lattice.neighbor(node, i, +1);
    const double h = lattice.dx()[i];
    if (lo && hi) {
      grad[i] = (field.V(slice, *hi) - field.V(slice, *lo)) / (2.0 * h);
    } else if (hi) {
      grad[i] = (field.V(slice, *hi) - field.V(slice, node)) / h;
    } else if (lo) {
      grad[i] = (field.V(slice, node) - field.V(slice, *lo)) / h;
    } else {
      grad[i] = 0.0;
    }
  }
  const Matrix sig = lattice.spec().sigma(lattice.time(slice), lattice.coordinates(node));
  return sig.transpose() * grad;
}

StoppingRule rho_rule(const ValueField& field, const Lattice& lattice, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error("game", "eps must lie in [0, 1)");
  if (field.V.slices() != lattice.slices() || field.V.nodes() != lattice.node_count()) {
    throw Error("game", "value field was not solved on this lattice");
  }
  StoppingRule rule(lattice, false);
  for (int s = 0; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      rule.set(s, node, lattice.terminal_reward(node) >= field.V(s, node) - eps);
    }
  }
  return rule;
}

double r_drift(const ValueField& field, const Lattice& lattice, const Policy& u, int slice, NodeId node) {
  if (slice < 0 || slice >= lattice.steps()) throw Error("game", "r_drift needs a non-terminal slice");
  return lattice.continuation(slice, node, u(slice, node), field.V.row(slice + 1)) - field.V(slice, node);
}

SliceTable<double> min_cost_to_stop(const Lattice& lattice, const StoppingRule& tau) {
  tau.require_valid(lattice, "game");
  std::vector<double> g(lattice.node_count());
  SliceTable<double> stop_values(lattice.slices(), lattice.node_count());
  for (std::size_t n = 0; n < lattice.node_count(); ++n) {
    g[n] = lattice.terminal_reward(static_cast<NodeId>(n));
    for (int s = 0; s < lattice.slices(); ++s) stop_values(s, static_cast<NodeId>(n)) = g[n];
  }
  return chain::horizon_expectation(lattice, lattice.steps(), g, nullptr, &tau, &stop_values);
}

SelectorAgreement selector_agreement(const ValueField& field, const Lattice& lattice) {
  SelectorAgreement out;
  out.ambiguity_tolerance = 1e-3 * lattice.dt() * lattice.dx().minCoeff();
  const int dim = lattice.dim();
  for (int s = 0; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (field.rho0.stops(s, node)) continue;
      bool smooth = !lattice.on_boundary(node);
      for (int i = 0; i < dim && smooth; ++i) {
        for (int off : {-1, +1}) {
          auto nb = lattice.neighbor(node, i, off);
          if (!nb || field.rho0.stops(s, *nb)) smooth = false;
        }
      }
      if (!smooth) {
        ++out.excluded;
        continue;
      }
      ++out.considered;
      const std::size_t selected = hamiltonian_selector(lattice.spec(), lattice.time(s), lattice.coordinates(node),
                                                        field.gamma_at(s, node, dim));
      const std::size_t chosen = field.ustar(s, node);
      if (selected == chosen) {
        ++out.agreed;
        continue;
      }
      auto next = field.V.row(s + 1);
      const double gap = std::abs(lattice.continuation(s, node, selected, next) -
                                  lattice.continuation(s, node, chosen, next));
      if (gap < out.ambiguity_tolerance) ++out.ambiguous;
    }
  }
  return out;
}

void write_value_csv(std::ostream& out, const ValueField& field, const Lattice& lattice) {
  const int dim = lattice.dim();
  out << "slice";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << ",V,g,ustar";
  for (int i = 0; i < dim; ++i) out << ",gamma" << i;
  out << ",stop\n";
  out << std::setprecision(17);
  for (int s = 0; s < lattice.slices(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      out << s;
      const Vector x = lattice.coordinates(node);
      for (int i = 0; i < dim; ++i) out << ',' << x[i];
      out << ',' << field.V(s, node) << ',' << lattice.terminal_reward(node) << ',';
      if (s < lattice.steps()) out << field.ustar(s, node);
      const Vector g = field.gamma_at(s, node, dim);
      for (int i = 0; i < dim; ++i) out << ',' << g[i];
      out << ',' << (field.rho0.stops(s, node) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace sdgame
