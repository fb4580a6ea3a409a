#pragma once

#include <ostream>

#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

namespace sdgame {

/// Stopper's value-to-go Z under a frozen control: the smallest table that
/// dominates g and satisfies the one-step supermartingale inequality.
struct SnellField {
  SliceTable<double> Z;
  Policy policy;
};

/// Z(T,.) = g; Z(t,x) = max(g(x), h(t,x,u) dt + sum p_u Z(t+1,.)).
SnellField snell_solve(const Lattice& lattice, const Policy& u);

/// Stop at (t,x) iff g(x) >= Z(t,x) - eps. Ties stop. Requires 0 <= eps < 1.
StoppingRule epsilon_stop_rule(const SnellField& field, const Lattice& lattice, double eps);

/// h dt + sum p Z(t+1,.) - Z(t,x): one-step conditional drift of the
/// running-reward-augmented Snell process. Non-positive everywhere, zero on
/// the continuation region.
double snell_drift(const SnellField& field, const Lattice& lattice, const Policy& u, int slice, NodeId node);

/// CSV with header: slice,x0..x{n-1},Z,g,drift (drift empty on the last slice).
void write_snell_csv(std::ostream& out, const SnellField& field, const Lattice& lattice);

}  // namespace sdgame
