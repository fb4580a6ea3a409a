#include "sdgame/certify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sdgame/chain.hpp"
#include "sdgame/error.hpp"
#include "sdgame/oracle.hpp"
#include "sdgame/snell.hpp"

namespace sdgame {

namespace {

constexpr const char* kMarkovNote =
    "alternatives range over Markov (node-indexed) policies and stopping rules only";

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::optional<Location> where;
  std::size_t count = 0;

  void offer(double v, int slice, NodeId node, long long policy_id) {
    ++count;
    if (v > value || !where) {
      if (v > value) value = v;
      where = Location{slice, node, policy_id};
    }
  }
};

CheckRecord record(std::string id, std::string tag, const Worst& w, double tol, std::string detail,
                   bool mandatory = true) {
  CheckRecord r;
  r.id = std::move(id);
  r.tag = std::move(tag);
  r.mandatory = mandatory;
  r.tolerance = tol;
  r.worst_residual = (w.count ? w.value : 0.0) + 0.0;  // drop the sign of -0
  r.status = r.worst_residual <= tol ? CheckStatus::pass : CheckStatus::fail;
  r.location = w.where;
  r.detail = std::move(detail);
  if (w.count == 0) r.detail += (r.detail.empty() ? "" : "; ") + std::string("no nodes to check");
  return r;
}

CheckRecord skipped(std::string id, std::string tag, double tol, std::string detail) {
  CheckRecord r;
  r.id = std::move(id);
  r.tag = std::move(tag);
  r.status = CheckStatus::skipped;
  r.mandatory = false;
  r.tolerance = tol;
  r.detail = std::move(detail);
  return r;
}

std::vector<NodeId> root_decision_nodes(const Lattice& lattice, std::vector<int>& slices) {
  const auto seen = chain::reached(lattice, nullptr, nullptr, 0, lattice.root());
  std::vector<NodeId> nodes;
  slices.clear();
  for (int s = 0; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      if (seen(s, static_cast<NodeId>(n))) {
        nodes.push_back(static_cast<NodeId>(n));
        slices.push_back(s);
      }
    }
  }
  return nodes;
}

std::uint64_t power_or_cap(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / std::max<std::uint64_t>(base, 1)) return cap + 1;
    out *= base;
  }
  return out;
}

void check_field(const ValueField& field, const Lattice& lattice) {
  if (field.V.slices() != lattice.slices() || field.V.nodes() != lattice.node_count()) {
    throw Error("certify", "value field was not solved on this lattice");
  }
}

std::vector<Policy> sample_policies(const Lattice& lattice, const ValueField& field, int n, std::uint64_t seed) {
  std::vector<Policy> out;
  out.push_back(field.ustar);
  for (int k = 0; k < n; ++k) out.push_back(Policy::uniform_random(lattice, derive_seed(seed, static_cast<std::uint64_t>(k))));
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "unknown";
}

bool CertificationReport::verdict() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) {
    return !c.mandatory || c.status != CheckStatus::fail;
  });
}

const CheckRecord* CertificationReport::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void CertificationReport::append(const CertificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  for (const auto& n : other.notes) {
    if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
  }
}

nlohmann::json to_json(const CertificationReport& report, const Lattice* lattice) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j{{"id", c.id},
                     {"tag", c.tag},
                     {"status", to_string(c.status)},
                     {"mandatory", c.mandatory},
                     {"worst_residual", c.worst_residual},
                     {"tolerance", c.tolerance},
                     {"detail", c.detail}};
    if (c.location) {
      nlohmann::json loc{{"slice", c.location->slice}, {"node", c.location->node}, {"policy_id", c.location->policy_id}};
      if (lattice && c.location->slice >= 0) {
        const Vector x = lattice->coordinates(c.location->node);
        loc["x"] = std::vector<double>(x.data(), x.data() + x.size());
      }
      j["location"] = loc;
    }
    checks.push_back(j);
  }
  return nlohmann::json{{"name", report.name},
                        {"verdict", report.verdict() ? "pass" : "fail"},
                        {"tolerances",
                         {{"exact_chain", report.tolerances.exact_chain},
                          {"arithmetic", report.tolerances.arithmetic},
                          {"mc_standard_errors", report.tolerances.mc_standard_errors}}},
                        {"checks", checks},
                        {"notes", report.notes}};
}

void write_text(std::ostream& out, const CertificationReport& report) {
  std::size_t id_width = 5;
  for (const auto& c : report.checks) id_width = std::max(id_width, c.id.size());
  out << std::left << std::setw(static_cast<int>(id_width)) << "check" << "  " << std::setw(7) << "status"
      << "  " << std::setw(13) << "residual" << "  " << std::setw(9) << "tol" << "  location\n";
  for (const auto& c : report.checks) {
    out << std::left << std::setw(static_cast<int>(id_width)) << c.id << "  " << std::setw(7) << to_string(c.status)
        << "  " << std::setw(13) << std::setprecision(6) << c.worst_residual << "  " << std::setw(9) << c.tolerance
        << "  ";
    if (c.location) {
      out << "slice " << c.location->slice << " node " << c.location->node;
      if (c.location->policy_id >= 0) out << " alt " << c.location->policy_id;
    } else {
      out << "-";
    }
    out << '\n';
  }
  for (const auto& n : report.notes) out << "note: " << n << '\n';
  out << "verdict: " << (report.verdict() ? "pass" : "fail") << '\n';
}

CertificationReport certify_saddle(const ValueField& field, const Lattice& lattice, const Policy& u_star,
                                   const StoppingRule& tau_star, int n_alt_policies, std::uint64_t seed,
                                   const CertifyOptions& options) {
  check_field(field, lattice);
  u_star.require_valid(lattice, "certify");
  tau_star.require_valid(lattice, "certify");
  const Tolerances& tol = options.tol;
  CertificationReport report;
  report.name = "saddle";
  report.tolerances = tol;
  report.notes.push_back(kMarkovNote);
  report.notes.push_back("pre-stopping nodes: reachable from the root with positive probability before the stop region");

  const auto live = chain::reached(lattice, &u_star, &tau_star, 0, lattice.root());
  Worst stop_value, martingale;
  for (int s = 0; s <= lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (!live(s, node)) continue;
      if (tau_star.stops(s, node)) {
        stop_value.offer(std::abs(field.V(s, node) - lattice.terminal_reward(node)), s, node, -1);
      } else {
        martingale.offer(std::abs(r_drift(field, lattice, u_star, s, node)), s, node, -1);
      }
    }
  }
  report.checks.push_back(record("saddle.stop-value", "saddle-characterization", stop_value, tol.arithmetic,
                                 "V equals g where the rule stops"));
  report.checks.push_back(record("saddle.martingale", "saddle-characterization", martingale, tol.exact_chain,
                                 "one-step drift of the controller's process under u* before stopping"));

  std::vector<int> slices;
  const auto decision = root_decision_nodes(lattice, slices);
  const std::uint64_t total = power_or_cap(lattice.action_count(), decision.size(), options.exhaustive_policy_cap);
  const bool exhaustive = total <= options.exhaustive_policy_cap;

  Worst sub;
  auto scan = [&](const Policy& u, long long id) {
    const auto seen = chain::reached(lattice, &u, &tau_star, 0, lattice.root());
    for (int s = 0; s < lattice.steps(); ++s) {
      for (std::size_t n = 0; n < lattice.node_count(); ++n) {
        const auto node = static_cast<NodeId>(n);
        if (seen(s, node) && !tau_star.stops(s, node)) sub.offer(-r_drift(field, lattice, u, s, node), s, node, id);
      }
    }
  };
  std::string detail;
  if (exhaustive) {
    Policy u = u_star;
    std::vector<std::uint32_t> digits(decision.size(), 0);
    long long id = 0;
    for (;;) {
      for (std::size_t k = 0; k < decision.size(); ++k) u.set(slices[k], decision[k], digits[k]);
      scan(u, id++);
      std::size_t k = 0;
      for (; k < digits.size(); ++k) {
        if (++digits[k] < lattice.action_count()) break;
        digits[k] = 0;
      }
      if (k == digits.size()) break;
    }
    detail = "exhaustive over " + std::to_string(id) + " Markov policies on " + std::to_string(decision.size()) +
             " root-reachable nodes";
  } else {
    for (int k = 0; k < n_alt_policies; ++k) {
      scan(Policy::uniform_random(lattice, derive_seed(seed, static_cast<std::uint64_t>(k))), k);
    }
    detail = "sampled " + std::to_string(n_alt_policies) + " uniform random policies (seed " + std::to_string(seed) + ")";
  }
  report.checks.push_back(record("saddle.submartingale", "saddle-characterization", sub, tol.exact_chain, detail));
  return report;
}

CertificationReport certify_thrifty(const Lattice& lattice, const ValueField& field, const Policy& u,
                                    const CertifyOptions& options) {
  check_field(field, lattice);
  u.require_valid(lattice, "certify");
  const Tolerances& tol = options.tol;
  CertificationReport report;
  report.name = "thrifty";
  report.tolerances = tol;

  const SnellField zu = snell_solve(lattice, u);
  const StoppingRule tau_u = epsilon_stop_rule(zu, lattice, 0.0);
  const auto live = chain::reached(lattice, &u, &tau_u, 0, lattice.root());
  Worst martingale;
  for (int s = 0; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (live(s, node) && !tau_u.stops(s, node)) {
        martingale.offer(std::abs(r_drift(field, lattice, u, s, node)), s, node, -1);
      }
    }
  }
  report.checks.push_back(record("thrifty.martingale", "thriftiness", martingale, tol.exact_chain,
                                 "value-process drift under u before the u-Snell stopping time"));

  Worst identity;
  std::ostringstream ladder;
  for (std::size_t e = 0; e < options.eps_ladder.size(); ++e) {
    const double eps = options.eps_ladder[e];
    ladder << (e ? "," : "") << eps;
    const StoppingRule a = epsilon_stop_rule(zu, lattice, eps);
    const StoppingRule b = rho_rule(field, lattice, eps);
    const auto reach_a = chain::reached(lattice, &u, &a, 0, lattice.root());
    const auto reach_b = chain::reached(lattice, &u, &b, 0, lattice.root());
    for (int s = 0; s <= lattice.steps(); ++s) {
      for (std::size_t n = 0; n < lattice.node_count(); ++n) {
        const auto node = static_cast<NodeId>(n);
        if (!reach_a(s, node) && !reach_b(s, node)) continue;
        identity.offer(a.stops(s, node) != b.stops(s, node) ? 1.0 : 0.0, s, node, static_cast<long long>(e));
      }
    }
  }
  report.checks.push_back(record("thrifty.eps-identity", "thriftiness", identity, 0.0,
                                 "u-Snell and game eps-stop regions coincide on reachable nodes, eps in {" +
                                     ladder.str() + "}; residual 1 marks a mismatch, location policy_id is the eps index"));

  Worst optimal;
  const NodeId root = lattice.root();
  optimal.offer(std::abs(zu.Z(0, root) - field.V(0, root)), 0, root, -1);
  std::ostringstream os;
  os << std::setprecision(17) << "Z^u(0,x0)=" << zu.Z(0, root) << " V(0,x0)=" << field.V(0, root);
  report.checks.push_back(record("thrifty.optimal", "thriftiness", optimal, tol.exact_chain, os.str()));
  return report;
}

CertificationReport check_inequalities(const ValueField& field, const Lattice& lattice, int n_policies,
                                       std::uint64_t seed, const CertifyOptions& options) {
  check_field(field, lattice);
  const Tolerances& tol = options.tol;
  const int T = lattice.steps();
  const std::size_t N = lattice.node_count();
  CertificationReport report;
  report.name = "inequalities";
  report.tolerances = tol;
  report.notes.push_back(kMarkovNote);

  const auto policies = sample_policies(lattice, field, n_policies, seed);
  std::vector<double> cur(N), next(N);

  // horizon slices; thinned on large lattices so all-pairs tables stay bounded
  int stride = 1;
  while (stride < T && std::pow(T / stride + 1.0, 2) * static_cast<double>(N) > 2e7) ++stride;
  std::vector<int> horizons;
  for (int t = 0; t < T; t += stride) horizons.push_back(t);
  horizons.push_back(T);
  if (stride > 1) report.notes.push_back("horizon slices thinned to every " + std::to_string(stride) + "th slice");

  // stopped value under u is a submartingale, and V plus running reward stays below Z^u
  Worst stopped, below_snell;
  for (std::size_t k = 0; k < policies.size(); ++k) {
    const Policy& u = policies[k];
    const long long id = static_cast<long long>(k) - 1;
    const SnellField zu = snell_solve(lattice, u);
    for (int theta : horizons) {
      if (theta == 0) continue;
      for (int pass = 0; pass < 2; ++pass) {
        const bool with_stop = pass == 0;
        std::copy(field.V.row(theta).begin(), field.V.row(theta).end(), next.begin());
        for (int s = theta - 1; s >= 0; --s) {
          for (std::size_t n = 0; n < N; ++n) {
            const auto node = static_cast<NodeId>(n);
            cur[n] = with_stop && field.rho0.stops(s, node) ? field.V(s, node)
                                                           : lattice.continuation(s, node, u(s, node), next);
            if (with_stop) {
              stopped.offer(field.V(s, node) - cur[n], s, node, id);
            } else {
              below_snell.offer(cur[n] - zu.Z(s, node), s, node, id);
            }
          }
          std::swap(cur, next);
        }
      }
    }
  }
  const std::string sampled = "ustar and " + std::to_string(n_policies) + " random policies, all slice pairs";
  report.checks.push_back(record("ineq.stopped-submartingale", "value-process", stopped, tol.exact_chain,
                                 "V(t) <= E^u[V(theta ^ rho_t) + running]; " + sampled));
  report.checks.push_back(record("ineq.below-snell", "value-process", below_snell, tol.exact_chain,
                                 "E^u[V(theta) + running] <= Z^u(t); " + sampled));

  // controller's best expected cost-plus-value is non-increasing in the horizon
  std::vector<SliceTable<double>> best(static_cast<std::size_t>(T) + 1);
  for (int theta : horizons) best[theta] = chain::horizon_expectation(lattice, theta, field.V.row(theta), nullptr);
  const auto earliest = chain::earliest_stop(lattice, field.rho0);
  Worst nonincreasing, flat;
  SliceTable<int> reach_min(lattice.slices(), N, T);
  for (int t : horizons) {
    // reach_min(s, x): earliest possible stop at or after t over paths from (s, x)
    for (std::size_t n = 0; n < N; ++n) reach_min(t, static_cast<NodeId>(n)) = earliest(t, static_cast<NodeId>(n));
    for (int s = t - 1; s >= 0; --s) {
      for (std::size_t n = 0; n < N; ++n) {
        const auto node = static_cast<NodeId>(n);
        int m = T;
        for (std::size_t a = 0; a < lattice.action_count(); ++a) {
          for (const Outcome& o : lattice.transition(s, node, a)) {
            if (o.prob > 0.0) m = std::min(m, reach_min(s + 1, o.node));
          }
        }
        reach_min(s, node) = m;
      }
    }
    for (int s = 0; s <= t; ++s) {
      for (std::size_t n = 0; n < N; ++n) {
        const auto node = static_cast<NodeId>(n);
        const double at_t = best[t](s, node);
        nonincreasing.offer(at_t - field.V(s, node), s, node, -1);
        if (earliest(s, node) >= t) flat.offer(std::abs(at_t - field.V(s, node)), s, node, -1);
        for (int theta : horizons) {
          if (theta < t) continue;
          const double at_theta = best[theta](s, node);
          nonincreasing.offer(at_theta - at_t, s, node, -1);
          if (reach_min(s, node) >= theta) flat.offer(std::abs(at_theta - at_t), s, node, -1);
        }
      }
    }
  }
  report.checks.push_back(record("ineq.nonincreasing", "value-process", nonincreasing, tol.exact_chain,
                                 "min_u E^u[V(theta)+running | s] <= min_u E^u[V(t)+running | s] <= V(s), s<=t<=theta"));
  report.checks.push_back(record("ineq.flat-before-stop", "value-process", flat, tol.exact_chain,
                                 "equalities of the previous chain when theta <= rho_t (resp. t <= rho_s) on every path"));

  // horizon identity on tiny lattices: min_u E[V(theta)+running] = sup_{tau>=theta} inf_u E[Y]
  {
    OracleOptions oo;
    oo.max_pair_evaluations = options.oracle_pair_cap;
    Worst identity;
    std::string detail = "exhaustive over Markov policies and rules from every root-reachable node";
    bool tiny = true;
    try {
      (void)enumerate_subgame(lattice, 0, lattice.root(), 0, field.V.row(0), oo);
    } catch (const Error&) {
      tiny = false;
    }
    if (tiny) {
      const auto seen = chain::reached(lattice, nullptr, nullptr, 0, lattice.root());
      for (int t = 0; t <= T; ++t) {
        for (std::size_t n = 0; n < N; ++n) {
          const auto node = static_cast<NodeId>(n);
          if (!seen(t, node)) continue;
          for (int theta = t; theta <= T; ++theta) {
            const SubgameValues sv = enumerate_subgame(lattice, t, node, theta, field.V.row(theta), oo);
            identity.offer(std::abs(sv.horizon_min - sv.lower), t, node, theta);
            identity.offer(std::abs(sv.lower - sv.upper), t, node, theta);
            identity.offer(std::abs(sv.horizon_min - best[theta](t, node)), t, node, theta);
          }
        }
      }
      report.checks.push_back(record("ineq.horizon-identity", "value-process", identity, tol.exact_chain,
                                     detail + "; location policy_id holds theta"));
    } else {
      report.checks.push_back(skipped("ineq.horizon-identity", "value-process", tol.exact_chain,
                                      "lattice exceeds the enumeration cap; identity is checked on tiny lattices only"));
    }
  }

  // stop-region orderings
  Worst ordering;
  for (std::size_t k = 0; k < policies.size(); ++k) {
    const long long id = static_cast<long long>(k) - 1;
    const SnellField zu = snell_solve(lattice, policies[k]);
    const StoppingRule u0 = epsilon_stop_rule(zu, lattice, 0.0);
    for (double eps : options.eps_ladder) {
      const StoppingRule ue = epsilon_stop_rule(zu, lattice, eps);
      const StoppingRule re = rho_rule(field, lattice, eps);
      for (int s = 0; s < T; ++s) {
        for (std::size_t n = 0; n < N; ++n) {
          const auto node = static_cast<NodeId>(n);
          const bool bad = (u0.stops(s, node) && !field.rho0.stops(s, node)) ||
                           (field.rho0.stops(s, node) && !re.stops(s, node)) ||
                           (ue.stops(s, node) && !re.stops(s, node));
          ordering.offer(bad ? 1.0 : 0.0, s, node, id);
        }
      }
    }
  }
  report.checks.push_back(record("ineq.stop-ordering", "value-process", ordering, 0.0,
                                 "rho(eps) stops no later than rho(0) and the u-Snell eps rule; rho(0) no later than the "
                                 "u-Snell rule; residual 1 marks a violating node"));
  return report;
}

CertificationReport check_saddle_inequalities(const ValueField& field, const Lattice& lattice, const Policy& u_star,
                                              const StoppingRule& tau_star, SaddleMode mode, int budget,
                                              std::uint64_t seed, const CertifyOptions& options) {
  check_field(field, lattice);
  u_star.require_valid(lattice, "certify");
  tau_star.require_valid(lattice, "certify");
  const double tol = options.tol.exact_chain;
  CertificationReport report;
  report.name = "saddle-inequalities";
  report.tolerances = options.tol;
  report.notes.push_back(kMarkovNote);

  Worst stopper, controller;
  std::string detail;
  const NodeId root = lattice.root();
  if (mode == SaddleMode::exhaustive) {
    OracleOptions oo;
    oo.max_rules = options.exhaustive_rule_cap;
    oo.max_policies = options.exhaustive_policy_cap;
    const SaddleCheckResult r = enumerate_saddle_check(lattice, u_star, tau_star, tol, oo);
    auto where = [&](SaddleViolation::Side side) -> std::pair<int, NodeId> {
      if (r.worst.side == side && !r.worst.deviations.empty()) return r.worst.deviations.front();
      return {0, root};
    };
    const auto ls = where(SaddleViolation::Side::stopper);
    const auto lc = where(SaddleViolation::Side::controller);
    stopper.offer(r.max_stopper_gain, ls.first, ls.second, -1);
    controller.offer(r.max_controller_gain, lc.first, lc.second, -1);
    std::ostringstream os;
    os << std::setprecision(17) << "exhaustive: " << r.rules_checked << " rules, " << r.policies_checked
       << " policies; E^{u*}[Y(tau*)]=" << r.middle;
    detail = os.str();
  } else {
    const double middle = chain::stopped_payoff(lattice, u_star, tau_star)(0, root);
    std::vector<StoppingRule> rules;
    for (int s = 0; s <= lattice.steps(); ++s) rules.push_back(StoppingRule::stop_from_slice(lattice, s));
    for (int k = 0; k < budget; ++k) rules.push_back(StoppingRule::uniform_random(lattice, derive_seed(seed, 2 * k)));
    std::vector<Policy> policies;
    for (std::size_t a = 0; a < lattice.action_count(); ++a) policies.emplace_back(lattice, a);
    for (int k = 0; k < budget; ++k) policies.push_back(Policy::uniform_random(lattice, derive_seed(seed, 2 * k + 1)));
    // the u-Snell rules of the sampled policies are the stopper's sharpest replies to them
    for (int k = 0; k < budget; ++k) {
      rules.push_back(epsilon_stop_rule(snell_solve(lattice, policies[lattice.action_count() + k]), lattice, 0.0));
    }
    for (std::size_t k = 0; k < rules.size(); ++k) {
      stopper.offer(chain::stopped_payoff(lattice, u_star, rules[k])(0, root) - middle, 0, root,
                    static_cast<long long>(k));
    }
    for (std::size_t k = 0; k < policies.size(); ++k) {
      controller.offer(middle - chain::stopped_payoff(lattice, policies[k], tau_star)(0, root), 0, root,
                       static_cast<long long>(k));
    }
    std::ostringstream os;
    os << std::setprecision(17) << "sampled: " << rules.size() << " rules, " << policies.size()
       << " policies (seed " << seed << "); E^{u*}[Y(tau*)]=" << middle;
    detail = os.str();
  }
  report.checks.push_back(record("saddle-ineq.stopper", "saddle-inequalities", stopper, tol,
                                 "E^{u*}[Y(tau)] <= E^{u*}[Y(tau*)]; " + detail));
  report.checks.push_back(record("saddle-ineq.controller", "saddle-inequalities", controller, tol,
                                 "E^{u*}[Y(tau*)] <= E^u[Y(tau*)]; " + detail));
  return report;
}

}  // namespace sdgame
