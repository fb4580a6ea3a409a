#include "sdgame/measure.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <random>
#include <thread>

#include "sdgame/error.hpp"

namespace sdgame {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent Gaussian stream for one path.
class PathNoise {
 public:
  PathNoise(std::uint64_t seed, std::size_t path, NoiseKind kind, double dt)
      : rng_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(path) + 1))), kind_(kind), scale_(std::sqrt(dt)) {}

  void draw(Vector& dw) {
    for (Eigen::Index i = 0; i < dw.size(); ++i) dw[i] = kind_ == NoiseKind::zero ? 0.0 : scale_ * normal_(rng_);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  NoiseKind kind_;
  double scale_;
};

/// Runs fn(begin, end) over [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
  if (workers == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Vector solve_phi(const GameSpec& spec, double t, const Vector& x, const Vector& f, std::size_t path, int slice) {
  const Matrix sig = spec.sigma(t, x);
  if (sig.rows() == 1) {
    if (sig(0, 0) == 0.0) {
      throw Error("measure", "sigma singular on path " + std::to_string(path) + " at slice " + std::to_string(slice));
    }
    return f / sig(0, 0);
  }
  Eigen::FullPivLU<Matrix> lu(sig);
  if (!lu.isInvertible()) {
    throw Error("measure", "sigma singular on path " + std::to_string(path) + " at slice " + std::to_string(slice));
  }
  return lu.solve(f);
}

Estimate summarize(const std::vector<double>& samples, const char* mode, std::uint64_t seed) {
  Estimate e;
  e.n_paths = samples.size();
  e.mode = mode;
  e.seed = seed;
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.estimate = pairwise_sum(samples) / n;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - e.estimate) * (samples[i] - e.estimate);
    e.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

}  // namespace

const char* to_string(PathMode mode) { return mode == PathMode::reference ? "reference" : "controlled"; }
const char* to_string(PayoffMode mode) { return mode == PayoffMode::reweight ? "reweight" : "direct"; }

nlohmann::json to_json(const Estimate& e) {
  return nlohmann::json{{"estimate", e.estimate}, {"se", e.se}, {"n_paths", e.n_paths}, {"mode", e.mode}, {"seed", e.seed}};
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::span<const double> PathBundle::state(std::size_t path, int slice) const {
  const std::size_t d = static_cast<std::size_t>(dim);
  return {states.data() + (path * static_cast<std::size_t>(steps + 1) + static_cast<std::size_t>(slice)) * d, d};
}

std::span<const double> PathBundle::increment(std::size_t path, int slice) const {
  const std::size_t d = static_cast<std::size_t>(dim);
  return {noise.data() + (path * static_cast<std::size_t>(steps) + static_cast<std::size_t>(slice)) * d, d};
}

PathBundle simulate(const Lattice& lattice, PathMode mode, const Policy* u, std::size_t n_paths, std::uint64_t seed,
                    const SimulationOptions& options) {
  if (n_paths < 1) throw Error("measure", "n_paths must be >= 1");
  if (mode == PathMode::controlled) {
    if (!u) throw Error("measure", "controlled mode needs a policy");
    u->require_valid(lattice, "measure");
  }
  const GameSpec& spec = lattice.spec();
  PathBundle b;
  b.count = n_paths;
  b.steps = lattice.steps();
  b.dim = spec.dim;
  b.dt = lattice.dt();
  b.mode = mode;
  b.seed = seed;
  if (u) b.policy = *u;
  for (int s = 0; s <= b.steps; ++s) b.times.push_back(lattice.time(s));
  const std::size_t d = static_cast<std::size_t>(b.dim);
  b.states.resize(n_paths * static_cast<std::size_t>(b.steps + 1) * d);
  b.noise.resize(n_paths * static_cast<std::size_t>(b.steps) * d);

  parallel_for(n_paths, options.threads, [&](std::size_t begin, std::size_t end) {
    Vector x(b.dim), dw(b.dim);
    for (std::size_t p = begin; p < end; ++p) {
      PathNoise noise(seed, p, options.noise, lattice.dt());
      x = spec.initial_state;
      double* out = b.states.data() + p * static_cast<std::size_t>(b.steps + 1) * d;
      double* inc = b.noise.data() + p * static_cast<std::size_t>(b.steps) * d;
      std::copy(x.data(), x.data() + b.dim, out);
      for (int s = 0; s < b.steps; ++s) {
        const double t = lattice.time(s);
        noise.draw(dw);
        Vector next = x + spec.sigma(t, x) * dw;
        if (mode == PathMode::controlled) {
          const std::size_t a = (*u)(s, lattice.nearest_node(x));
          next += spec.drift(t, x, spec.actions[a]) * lattice.dt();
        }
        std::copy(dw.data(), dw.data() + b.dim, inc + static_cast<std::size_t>(s) * d);
        x = next;
        std::copy(x.data(), x.data() + b.dim, out + static_cast<std::size_t>(s + 1) * d);
      }
    }
  });
  return b;
}

LikelihoodPath likelihood_ratio(const PathBundle& bundle, const Lattice& lattice, const Policy& u) {
  if (bundle.mode != PathMode::reference) throw Error("measure", "likelihood_ratio needs a reference-mode bundle");
  u.require_valid(lattice, "measure");
  const GameSpec& spec = lattice.spec();
  LikelihoodPath lr;
  lr.count = bundle.count;
  lr.steps = bundle.steps;
  lr.values.resize(bundle.count * static_cast<std::size_t>(bundle.steps + 1));
  for (std::size_t p = 0; p < bundle.count; ++p) {
    double* out = lr.values.data() + p * static_cast<std::size_t>(bundle.steps + 1);
    out[0] = 1.0;
    for (int s = 0; s < bundle.steps; ++s) {
      const double t = bundle.times[static_cast<std::size_t>(s)];
      const auto xs = bundle.state(p, s);
      const auto ws = bundle.increment(p, s);
      const Vector x = Eigen::Map<const Vector>(xs.data(), bundle.dim);
      const Vector dw = Eigen::Map<const Vector>(ws.data(), bundle.dim);
      const std::size_t a = u(s, lattice.nearest_node(x));
      const Vector phi = solve_phi(spec, t, x, spec.drift(t, x, spec.actions[a]), p, s);
      out[s + 1] = out[s] * std::exp(phi.dot(dw) - 0.5 * phi.squaredNorm() * bundle.dt);
    }
  }
  return lr;
}

Estimate expected_payoff(const Lattice& lattice, const Policy& u, const StoppingRule& tau, PayoffMode mode,
                         std::size_t n_paths, std::uint64_t seed, const SimulationOptions& options) {
  if (n_paths < 1) throw Error("measure", "n_paths must be >= 1");
  u.require_valid(lattice, "measure");
  tau.require_valid(lattice, "measure");
  const GameSpec& spec = lattice.spec();
  const double dt = lattice.dt();
  std::vector<double> samples(n_paths);

  parallel_for(n_paths, options.threads, [&](std::size_t begin, std::size_t end) {
    Vector x(spec.dim), dw(spec.dim);
    for (std::size_t p = begin; p < end; ++p) {
      PathNoise noise(seed, p, options.noise, dt);
      x = spec.initial_state;
      double log_weight = 0.0;
      double running = 0.0;
      double payoff = 0.0;
      for (int s = 0;; ++s) {
        const NodeId node = lattice.nearest_node(x);
        if (s == lattice.steps() || tau.stops(s, node)) {
          payoff = running + spec.terminal_reward(x);
          break;
        }
        const double t = lattice.time(s);
        const Vector& a = spec.actions[u(s, node)];
        const Vector f = spec.drift(t, x, a);
        running += spec.running_reward(t, x, a) * dt;
        noise.draw(dw);
        if (mode == PayoffMode::reweight) {
          const Vector phi = solve_phi(spec, t, x, f, p, s);
          log_weight += phi.dot(dw) - 0.5 * phi.squaredNorm() * dt;
          x += spec.sigma(t, x) * dw;
        } else {
          x += f * dt + spec.sigma(t, x) * dw;
        }
      }
      samples[p] = mode == PayoffMode::reweight ? std::exp(log_weight) * payoff : payoff;
    }
  });
  return summarize(samples, to_string(mode), seed);
}

Estimate terminal_likelihood_mean(const Lattice& lattice, const Policy& u, std::size_t n_paths, std::uint64_t seed,
                                  const SimulationOptions& options) {
  if (n_paths < 1) throw Error("measure", "n_paths must be >= 1");
  u.require_valid(lattice, "measure");
  const GameSpec& spec = lattice.spec();
  const double dt = lattice.dt();
  std::vector<double> samples(n_paths);
  parallel_for(n_paths, options.threads, [&](std::size_t begin, std::size_t end) {
    Vector x(spec.dim), dw(spec.dim);
    for (std::size_t p = begin; p < end; ++p) {
      PathNoise noise(seed, p, options.noise, dt);
      x = spec.initial_state;
      double lambda = 1.0;
      for (int s = 0; s < lattice.steps(); ++s) {
        const double t = lattice.time(s);
        const Vector f = spec.drift(t, x, spec.actions[u(s, lattice.nearest_node(x))]);
        const Vector phi = solve_phi(spec, t, x, f, p, s);
        noise.draw(dw);
        lambda *= std::exp(phi.dot(dw) - 0.5 * phi.squaredNorm() * dt);
        x += spec.sigma(t, x) * dw;
      }
      samples[p] = lambda;
    }
  });
  return summarize(samples, "likelihood", seed);
}

StrategyChangeReport conditional_change_of_strategy_check(const Lattice& lattice, const Policy& u, const Policy& v,
                                                          int theta_slice, std::size_t n_paths, std::uint64_t seed,
                                                          double clamp, const SimulationOptions& options) {
  u.require_valid(lattice, "measure");
  v.require_valid(lattice, "measure");
  if (theta_slice < 0 || theta_slice > lattice.steps()) throw Error("measure", "theta slice out of range");
  for (int s = 0; s < theta_slice; ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      if (u(s, static_cast<NodeId>(n)) != v(s, static_cast<NodeId>(n))) {
        throw Error("measure", "policies differ on the agreement window at slice " + std::to_string(s) + ", node " +
                                   std::to_string(n));
      }
    }
  }
  const GameSpec& spec = lattice.spec();
  const double dt = lattice.dt();
  std::vector<double> su(n_paths), sv(n_paths);
  parallel_for(n_paths, options.threads, [&](std::size_t begin, std::size_t end) {
    Vector x(spec.dim), dw(spec.dim);
    for (std::size_t p = begin; p < end; ++p) {
      PathNoise noise(seed, p, options.noise, dt);
      x = spec.initial_state;
      double log_u = 0.0;
      double log_v = 0.0;
      double xi = 0.0;
      for (int s = 0; s <= lattice.steps(); ++s) {
        if (s == theta_slice) xi = std::clamp(spec.terminal_reward(x), -clamp, clamp);
        if (s == lattice.steps()) break;
        const double t = lattice.time(s);
        const NodeId node = lattice.nearest_node(x);
        const Vector phi_u = solve_phi(spec, t, x, spec.drift(t, x, spec.actions[u(s, node)]), p, s);
        const Vector phi_v = solve_phi(spec, t, x, spec.drift(t, x, spec.actions[v(s, node)]), p, s);
        noise.draw(dw);
        log_u += phi_u.dot(dw) - 0.5 * phi_u.squaredNorm() * dt;
        log_v += phi_v.dot(dw) - 0.5 * phi_v.squaredNorm() * dt;
        x += spec.sigma(t, x) * dw;
      }
      su[p] = std::exp(log_u) * xi;
      sv[p] = std::exp(log_v) * xi;
    }
  });
  StrategyChangeReport r;
  r.theta_slice = theta_slice;
  r.clamp = clamp;
  r.under_u = summarize(su, "reweight", seed);
  r.under_v = summarize(sv, "reweight", seed);
  r.difference = r.under_u.estimate - r.under_v.estimate;
  r.combined_se = std::sqrt(r.under_u.se * r.under_u.se + r.under_v.se * r.under_v.se);
  r.agree = std::abs(r.difference) <= 3.0 * r.combined_se;
  return r;
}

void write_paths_csv(std::ostream& out, const PathBundle& bundle) {
  out << "path,slice,t";
  for (int i = 0; i < bundle.dim; ++i) out << ",x" << i;
  for (int i = 0; i < bundle.dim; ++i) out << ",dW" << i;
  out << '\n' << std::setprecision(17);
  for (std::size_t p = 0; p < bundle.count; ++p) {
    for (int s = 0; s <= bundle.steps; ++s) {
      out << p << ',' << s << ',' << bundle.times[static_cast<std::size_t>(s)];
      for (double v : bundle.state(p, s)) out << ',' << v;
      if (s < bundle.steps) {
        for (double v : bundle.increment(p, s)) out << ',' << v;
      } else {
        for (int i = 0; i < bundle.dim; ++i) out << ',';
      }
      out << '\n';
    }
  }
}

}  // namespace sdgame
