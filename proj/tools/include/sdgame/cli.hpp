#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace sdgame::cli {

/// Everything a batch run needs. Unset lattice parameters fall back to the
/// instance's recommendation (tiny for `enumerate`, base otherwise).
struct RunConfig {
  std::string instance;
  std::string spec_path;
  std::optional<int> steps;
  std::optional<int> nodes_per_dim;
  std::vector<double> box_lower;  // empty: keep the spec's box
  std::vector<double> box_upper;
  bool tiny = false;  // use the instance's tiny lattice parameters
  long long n_paths = 20000;
  std::uint64_t seed = 1;
  int alt_policies = 100;
  std::vector<double> eps{0.0, 0.01, 0.1, 0.5};
  std::uint64_t policy_cap = std::uint64_t{1} << 16;
  std::uint64_t rule_cap = std::uint64_t{1} << 16;
  std::uint64_t pair_cap = std::uint64_t{1} << 20;
  int levels = 4;  // sweep refinement levels
  bool dump_paths = false;
  std::string out = "sdgame-out";
  int threads = 1;
  std::string format = "text";  // json | csv | text, for stdout
};

nlohmann::json to_json(const RunConfig& config);

/// Applies one textual setting by key (flag name without dashes, e.g.
/// "nodes-per-dim"). Lists are comma separated. Throws Error("cli", ...).
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Keys accepted by apply_setting, in documentation order.
const std::vector<std::string>& setting_keys();

/// Applies a JSON config file object: every member must be a known key.
void apply_config_json(RunConfig& config, const nlohmann::json& doc);

/// Checks positivity and mutual consistency; throws Error("cli", ...).
void validate(const RunConfig& config);

inline constexpr int kExitPass = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitError = 2;

/// Runs one subcommand: solve, certify, simulate, enumerate, sweep,
/// list-instances. Artifacts go under config.out; a summary goes to `out`.
/// Library errors propagate as sdgame::Error.
int run(const std::string& subcommand, const RunConfig& config, std::ostream& out);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Full command line handling: defaults < config file < SDGAME_* environment
/// < flags. Never throws; errors are printed to `err` with the failing
/// module named and yield kExitError.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const EnvLookup& env);

}  // namespace sdgame::cli
