#pragma once

#include <string>

#include "json.hpp"
#include "sdgame/model.hpp"

namespace sdgame {

/// Builds a GameSpec from a JSON document. Coefficients come from three
/// families:
///
///   constant    {"type": "constant", "value": ...}
///   affine      sigma:  {"type": "affine", "constant": M, "time": M, "state": [M_1..M_n]}
///               drift:  {"type": "affine", "constant": v, "time": v, "state": Mxn, "action": Mxm}
///               reward: {"type": "affine", "constant": c, "time": c, "state": [..], "action": [..]}
///   tabulated   rewards only: {"type": "tabulated", "coordinate": i,
///                              "points": [...], "values": [...]}
///               piecewise linear in state coordinate i, flat outside the table.
///
/// Matrices are row-major nested arrays. Missing affine terms are zero.
/// Top-level keys: name, dim, horizon, initial_state, actions, bound_K,
/// state_box {lower, upper}, sigma, drift, running_reward, terminal_reward.
GameSpec spec_from_json(const nlohmann::json& doc);

GameSpec load_spec_file(const std::string& path);

}  // namespace sdgame
