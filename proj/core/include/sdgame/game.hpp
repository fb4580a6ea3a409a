#pragma once

#include <cstddef>
#include <ostream>

#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

namespace sdgame {

/// Solved controller-vs-stopper game on a lattice.
struct ValueField {
  SliceTable<double> V;
  Policy ustar;            // minimizing action at every non-terminal node
  StoppingRule rho0;       // stop where g >= V
  std::vector<double> gamma;  // slices x nodes x dim, zero on the stop region

  Vector gamma_at(int slice, NodeId node, int dim) const;
};

/// V(T,.) = g; V(t,x) = max(g(x), min_a [h(t,x,a) dt + sum p_a V(t+1,.)]).
/// The minimizer is recorded in ustar; ties go to the lowest action index.
ValueField solve_game(const Lattice& lattice);

/// <p, sigma^{-1}(t,x) f(t,x,a)> + h(t,x,a). Throws when sigma(t,x) is singular.
double hamiltonian(const GameSpec& spec, double t, const Vector& x, const Vector& a, const Vector& p);

/// argmin of the Hamiltonian over the action set, lowest index on ties.
std::size_t hamiltonian_selector(const GameSpec& spec, double t, const Vector& x, const Vector& p);

/// sigma(t,x)^T grad_x V(t,x) by central differences (one-sided on the box
/// edge); the zero vector wherever field.rho0 stops.
Vector adjoint_gamma(const ValueField& field, const Lattice& lattice, int slice, NodeId node);

/// Stop at (t,x) iff g(x) >= V(t,x) - eps. Requires 0 <= eps < 1.
StoppingRule rho_rule(const ValueField& field, const Lattice& lattice, double eps);

/// h(t,x,u) dt + sum p_u V(t+1,.) - V(t,x): one-step drift of the
/// controller's cost-plus-value process under u.
double r_drift(const ValueField& field, const Lattice& lattice, const Policy& u, int slice, NodeId node);

/// Controller's minimal expected cost against a frozen stopping rule:
/// J = g on tau's stop region, J(t,x) = min_a [h dt + sum p_a J(t+1,.)] elsewhere.
SliceTable<double> min_cost_to_stop(const Lattice& lattice, const StoppingRule& tau);

struct SelectorAgreement {
  std::size_t considered = 0;  // interior continuation nodes away from the free boundary
  std::size_t agreed = 0;
  std::size_t ambiguous = 0;   // disagreements where the two best continuations are within tolerance
  std::size_t excluded = 0;    // continuation nodes skipped (box edge or next to the stop region)
  double ambiguity_tolerance = 0.0;

  double agreement_fraction() const { return considered ? static_cast<double>(agreed) / considered : 1.0; }
  double disagreement_fraction() const { return 1.0 - agreement_fraction(); }
};

/// Compares the Hamiltonian selector fed with p = gamma against ustar on
/// interior continuation nodes whose grid neighbors also continue.
SelectorAgreement selector_agreement(const ValueField& field, const Lattice& lattice);

/// CSV with header: slice,x0..,V,g,ustar,gamma0..,stop.
void write_value_csv(std::ostream& out, const ValueField& field, const Lattice& lattice);

}  // namespace sdgame
