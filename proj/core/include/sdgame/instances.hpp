#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdgame/model.hpp"

namespace sdgame {

/// A documented property of a built-in instance and how it is known.
/// provenance: "trivial" (follows from the definition) or "derived"
/// (recomputed by the named oracle in the test suite).
struct InstanceFact {
  std::string statement;
  std::string provenance;
  std::string oracle;
};

struct LatticeParams {
  int steps = 0;
  int nodes_per_dim = 0;
};

struct Instance {
  std::string name;
  std::string description;
  std::shared_ptr<const GameSpec> spec;
  LatticeParams tiny;  // small enough for exhaustive enumeration
  LatticeParams base;  // default resolution for solve/certify
  std::vector<InstanceFact> facts;
};

/// Names in catalog order.
std::vector<std::string> instance_names();

/// Immutable catalog, built once.
const std::vector<Instance>& catalog();

/// Throws Error("instances", ...) listing the catalog when `name` is unknown.
const Instance& instance(const std::string& name);

/// Copy of the spec of a built-in instance.
GameSpec builtin(const std::string& name);

nlohmann::json to_json(const Instance& inst);

/// Parameters of the catalog entries, exposed so tests can rebuild
/// variants (e.g. a different constant).
inline constexpr double kConstantG = 2.5;
inline constexpr double kNegativeH = -1.0;
inline constexpr double kBangBangMu = 0.25;

}  // namespace sdgame
