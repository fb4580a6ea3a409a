#include "sdgame/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sdgame/error.hpp"

namespace sdgame {

namespace {

constexpr double kActionMatchTol = 1e-12;

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

std::string format_point(double t, const Vector& x) {
  std::ostringstream os;
  os << "t=" << t << ", x=" << format_vector(x);
  return os.str();
}

std::vector<std::string> structural_problems(const GameSpec& spec) {
  std::vector<std::string> problems;
  if (spec.dim < 1) problems.push_back("dim must be positive");
  if (!(spec.horizon > 0.0)) problems.push_back("horizon must be positive");
  if (spec.initial_state.size() != spec.dim) problems.push_back("initial_state length differs from dim");
  if (spec.actions.empty()) problems.push_back("action set is empty");
  for (std::size_t i = 0; i < spec.actions.size(); ++i) {
    if (spec.actions[i].size() != spec.actions.front().size()) {
      problems.push_back("actions have inconsistent lengths");
      break;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.actions[i].size() == spec.actions[j].size() &&
          (spec.actions[i] - spec.actions[j]).cwiseAbs().maxCoeff() <= kActionMatchTol) {
        problems.push_back("duplicate action " + format_vector(spec.actions[i]));
      }
    }
  }
  if (!(spec.bound_K > 0.0)) problems.push_back("bound_K must be positive");
  if (spec.state_box.lower.size() != spec.dim || spec.state_box.upper.size() != spec.dim) {
    problems.push_back("state_box bounds have wrong length");
  } else if ((spec.state_box.upper - spec.state_box.lower).minCoeff() <= 0.0) {
    problems.push_back("state_box must have lower < upper in every coordinate");
  }
  if (!spec.sigma) problems.push_back("sigma is not set");
  if (!spec.drift) problems.push_back("drift is not set");
  if (!spec.running_reward) problems.push_back("running_reward is not set");
  if (!spec.terminal_reward) problems.push_back("terminal_reward is not set");
  return problems;
}

}  // namespace

bool StateBox::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

std::optional<std::size_t> find_action(const GameSpec& spec, const Vector& a) {
  for (std::size_t i = 0; i < spec.actions.size(); ++i) {
    const Vector& candidate = spec.actions[i];
    if (candidate.size() == a.size() &&
        (candidate.size() == 0 || (candidate - a).cwiseAbs().maxCoeff() <= kActionMatchTol)) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t require_action(const GameSpec& spec, const Vector& a) {
  auto idx = find_action(spec, a);
  if (!idx) throw Error("model", "action " + format_vector(a) + " is not in the action set");
  return *idx;
}

Coefficients evaluate_coefficients(const GameSpec& spec, double t, const Vector& x,
                                   const Vector& a) {
  require_action(spec, a);
  if (t < 0.0 || t > spec.horizon) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << spec.horizon << "]";
    throw Error("model", os.str());
  }
  return Coefficients{spec.drift(t, x, a), spec.sigma(t, x), spec.running_reward(t, x, a)};
}

bool ValidationReport::usable() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ValidationReport::failure_message() const {
  for (const auto& c : checks) {
    if (!c.passed) return c.name + ": " + c.message;
  }
  return {};
}

ValidationReport validate_spec(const GameSpec& spec, int probes, std::uint64_t seed) {
  if (probes < 1) throw Error("model", "validate_spec needs probes >= 1");

  ValidationReport report;
  report.probes = probes;
  report.seed = seed;

  auto problems = structural_problems(spec);
  AssumptionCheck structure{"structure", problems.empty(), static_cast<double>(problems.size()),
                            0.0, std::nullopt, {}};
  for (const auto& p : problems) {
    if (!structure.message.empty()) structure.message += "; ";
    structure.message += p;
  }
  report.checks.push_back(structure);
  if (!problems.empty()) return report;

  const double K = spec.bound_K;
  AssumptionCheck singular{"sigma nonsingular", true, 0.0, 0.0, std::nullopt, {}};
  AssumptionCheck inv_norm{"sigma inverse bound", true, 0.0, K, std::nullopt, {}};
  AssumptionCheck drift_growth{"drift growth bound", true, 0.0, K, std::nullopt, {}};
  AssumptionCheck reward_bound{"running reward bound", true, 0.0, K, std::nullopt, {}};
  AssumptionCheck finite{"finite coefficients", true, 0.0, 0.0, std::nullopt, {}};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const StateBox& box = spec.state_box;

  for (int probe = 0; probe < probes; ++probe) {
    double t = 0.0;
    Vector x = spec.initial_state;
    if (probe > 0) {
      t = spec.horizon * unit(rng);
      for (int i = 0; i < spec.dim; ++i) x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unit(rng);
    }

    const Matrix sig = spec.sigma(t, x);
    if (sig.rows() != spec.dim || sig.cols() != spec.dim || !sig.allFinite()) {
      if (finite.passed) {
        finite.passed = false;
        finite.worst = ProbePoint{t, x, 0};
        finite.message = "sigma has wrong shape or non-finite entries at " + format_point(t, x);
      }
    } else {
      Eigen::FullPivLU<Matrix> lu(sig);
      if (!lu.isInvertible()) {
        if (singular.passed) {
          singular.passed = false;
          singular.measured = 1.0;
          singular.worst = ProbePoint{t, x, 0};
          singular.message = "sigma singular at " + format_point(t, x);
        }
      } else {
        const Matrix inv = lu.inverse();
        const double norm = Eigen::JacobiSVD<Matrix>(inv).singularValues()(0);
        if (norm > inv_norm.measured) {
          inv_norm.measured = norm;
          inv_norm.worst = ProbePoint{t, x, 0};
        }
      }
    }

    for (std::size_t ai = 0; ai < spec.actions.size(); ++ai) {
      const Vector& a = spec.actions[ai];
      const Vector f = spec.drift(t, x, a);
      const double h = spec.running_reward(t, x, a);
      if (f.size() != spec.dim || !f.allFinite() || !std::isfinite(h)) {
        if (finite.passed) {
          finite.passed = false;
          finite.worst = ProbePoint{t, x, ai};
          finite.message = "drift or running reward malformed at " + format_point(t, x);
        }
        continue;
      }
      const double growth = f.norm() / (1.0 + x.norm());
      if (growth > drift_growth.measured) {
        drift_growth.measured = growth;
        drift_growth.worst = ProbePoint{t, x, ai};
      }
      if (std::abs(h) > reward_bound.measured) {
        reward_bound.measured = std::abs(h);
        reward_bound.worst = ProbePoint{t, x, ai};
      }
    }

    const double g = spec.terminal_reward(x);
    if (!std::isfinite(g) && finite.passed) {
      finite.passed = false;
      finite.worst = ProbePoint{t, x, 0};
      finite.message = "terminal reward non-finite at " + format_point(t, x);
    }
  }

  auto bound_message = [](AssumptionCheck& check, const std::string& what) {
    std::ostringstream os;
    os << what << (check.passed ? " within bound" : " exceeds bound") << ", measured "
       << check.measured << " vs " << check.bound;
    if (check.worst) os << " at " << format_point(check.worst->t, check.worst->x);
    check.message = os.str();
  };
  inv_norm.passed = inv_norm.measured <= K;
  drift_growth.passed = drift_growth.measured <= K;
  reward_bound.passed = reward_bound.measured <= K;
  bound_message(inv_norm, "sigma inverse norm");
  bound_message(drift_growth, "drift growth |f|/(1+|x|)");
  bound_message(reward_bound, "running reward");
  if (singular.passed) singular.message = "sigma invertible at every probe";
  if (finite.passed) finite.message = "all coefficients finite";

  report.checks.push_back(finite);
  report.checks.push_back(singular);
  report.checks.push_back(inv_norm);
  report.checks.push_back(drift_growth);
  report.checks.push_back(reward_bound);
  return report;
}

void require_usable(const ValidationReport& report) {
  if (!report.usable()) throw Error("model", report.failure_message());
}

}  // namespace sdgame
