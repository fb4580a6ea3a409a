#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdgame/game.hpp"
#include "sdgame/lattice.hpp"
#include "sdgame/policy.hpp"

namespace sdgame {

/// Fixed tolerances recorded in every report.
struct Tolerances {
  double exact_chain = 1e-10;      // identities computed by exact backward induction
  double arithmetic = 1e-12;       // pure floating-point identities
  double mc_standard_errors = 3.0; // Monte-Carlo agreement, in standard errors
};

struct CertifyOptions {
  Tolerances tol;
  std::vector<double> eps_ladder{0.0, 0.01, 0.1, 0.5};
  std::uint64_t exhaustive_policy_cap = std::uint64_t{1} << 16;
  std::uint64_t exhaustive_rule_cap = std::uint64_t{1} << 16;
  std::uint64_t oracle_pair_cap = std::uint64_t{1} << 20;
};

enum class CheckStatus { pass, fail, skipped };
const char* to_string(CheckStatus status);

/// Where a residual was worst. policy_id -1 is the tested policy; k >= 0
/// indexes the k-th alternative (enumerated or sampled) of that check.
struct Location {
  int slice = -1;
  NodeId node = 0;
  long long policy_id = -1;
};

struct CheckRecord {
  std::string id;
  std::string tag;  // property family the check certifies
  CheckStatus status = CheckStatus::pass;
  bool mandatory = true;
  double worst_residual = 0.0;  // largest violation measure; pass iff <= tolerance
  double tolerance = 0.0;
  std::optional<Location> location;
  std::string detail;
};

struct CertificationReport {
  std::string name;
  std::vector<CheckRecord> checks;
  std::vector<std::string> notes;
  Tolerances tolerances;

  /// pass iff every mandatory, non-skipped check passes.
  bool verdict() const;
  const CheckRecord* find(const std::string& id) const;
  void append(const CertificationReport& other);
};

nlohmann::json to_json(const CertificationReport& report, const Lattice* lattice = nullptr);
void write_text(std::ostream& out, const CertificationReport& report);

/// Saddle characterization of (u_star, tau_star):
///  saddle.stop-value    V = g on the stop nodes reached under (u*, tau*)
///  saddle.martingale    r_drift(u*) = 0 at every pre-stopping node
///  saddle.submartingale r_drift(u) >= 0 at pre-stopping nodes for every
///                       alternative u: all Markov policies on the root-reachable
///                       nodes when that count is within the cap, else
///                       n_alt_policies uniform random ones.
CertificationReport certify_saddle(const ValueField& field, const Lattice& lattice, const Policy& u_star,
                                   const StoppingRule& tau_star, int n_alt_policies, std::uint64_t seed,
                                   const CertifyOptions& options = {});

/// Thriftiness of u: martingale drift of the value process before the
/// u-Snell stopping time, identical eps-stop regions for the eps ladder, and
/// Z^u(0, x0) = V(0, x0).
CertificationReport certify_thrifty(const Lattice& lattice, const ValueField& field, const Policy& u,
                                    const CertifyOptions& options = {});

/// Value-process inequality suite over all slice pairs for ustar and
/// n_policies random policies, using exact chain expectations.
CertificationReport check_inequalities(const ValueField& field, const Lattice& lattice, int n_policies,
                                       std::uint64_t seed, const CertifyOptions& options = {});

enum class SaddleMode { exhaustive, sampled };

/// Both saddle inequalities against all (exhaustive) or `budget` sampled
/// alternatives per side. Exhaustive mode throws when the caps are exceeded.
CertificationReport check_saddle_inequalities(const ValueField& field, const Lattice& lattice, const Policy& u_star,
                                              const StoppingRule& tau_star, SaddleMode mode, int budget,
                                              std::uint64_t seed, const CertifyOptions& options = {});

/// Deterministic per-alternative seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace sdgame
