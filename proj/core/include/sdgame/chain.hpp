#pragma once

#include <cstdint>
#include <span>

#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

// Exact chain expectations by backward substitution. Shared by the game,
// certification and oracle layers; no Monte Carlo anywhere in here.
namespace sdgame::chain {

/// Expected payoff g(X_tau) + sum_{s<tau} h dt of the pair (u, tau), started
/// from every (slice, node).
SliceTable<double> stopped_payoff(const Lattice& lattice, const Policy& u, const StoppingRule& tau);

/// Backward expectation ending at `to_slice` with values `terminal_row` there.
/// Between slices it accumulates h dt under `policy`, or minimizes the
/// one-step continuation over actions when `policy` is null. When `stop` is
/// given, reaching a stop node at a slice < to_slice freezes the value at
/// `stop_values(slice, node)`. Rows after to_slice are left NaN.
SliceTable<double> horizon_expectation(const Lattice& lattice, int to_slice, std::span<const double> terminal_row,
                                       const Policy* policy, const StoppingRule* stop = nullptr,
                                       const SliceTable<double>* stop_values = nullptr);

/// Nodes reached with positive probability from (start_slice, start_node)
/// before `rule` stops (stop nodes themselves are marked reached). A null
/// policy means "under some action"; a null rule never stops before the horizon.
SliceTable<std::uint8_t> reached(const Lattice& lattice, const Policy* policy, const StoppingRule* rule,
                                 int start_slice, NodeId start_node);

/// Earliest slice >= t at which a path from (t, node) can enter a stop node of
/// `rule`, over every action sequence. Terminal slice counts as stop.
SliceTable<int> earliest_stop(const Lattice& lattice, const StoppingRule& rule);

}  // namespace sdgame::chain
