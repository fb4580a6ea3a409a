#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdtest {

PathTree::PathTree(const sdgame::GameSpec& spec, int steps, int nodes)
    : spec_(spec), steps_(steps), nodes_(nodes) {
  if (spec.dim != 1) throw std::invalid_argument("PathTree is one-dimensional");
  dt_ = spec.horizon / steps;
  lo_ = spec.state_box.lower(0);
  dx_ = (spec.state_box.upper(0) - lo_) / (nodes - 1);
  root_ = static_cast<int>(std::lround((spec.initial_state(0) - lo_) / dx_));
}

double PathTree::g(int index) const { return spec_.terminal_reward(sdgame::Vector::Constant(1, x(index))); }

std::vector<std::pair<int, double>> PathTree::kernel(int slice, int index, std::size_t action) const {
  const sdgame::Vector xv = sdgame::Vector::Constant(1, x(index));
  const double t = slice * dt_;
  const double f = spec_.drift(t, xv, spec_.actions[action])(0);
  const double s = spec_.sigma(t, xv)(0, 0);
  const double q = s * s * dt_ / (dx_ * dx_);
  const double m = f * dt_ / dx_;
  std::vector<std::pair<int, double>> out;
  auto add = [&](int j, double p) {
    j = std::clamp(j, 0, nodes_ - 1);
    for (auto& e : out) {
      if (e.first == j) {
        e.second += p;
        return;
      }
    }
    out.emplace_back(j, p);
  };
  add(index - 1, 0.5 * (q - m));
  add(index, 1.0 - q);
  add(index + 1, 0.5 * (q + m));
  return out;
}

double PathTree::h(int slice, int index, std::size_t action) const {
  return spec_.running_reward(slice * dt_, sdgame::Vector::Constant(1, x(index)), spec_.actions[action]);
}

double PathTree::game_value(int slice, int index) const {
  if (slice == steps_) return g(index);
  double best = INFINITY;
  for (std::size_t a = 0; a < spec_.actions.size(); ++a) {
    double c = h(slice, index, a) * dt_;
    for (auto [j, p] : kernel(slice, index, a)) c += p * game_value(slice + 1, j);
    best = std::min(best, c);
  }
  return std::max(g(index), best);
}

double PathTree::snell_value(const PolicyFn& u, int slice, int index) const {
  if (slice == steps_) return g(index);
  const std::size_t a = u(slice, index);
  double c = h(slice, index, a) * dt_;
  for (auto [j, p] : kernel(slice, index, a)) c += p * snell_value(u, slice + 1, j);
  return std::max(g(index), c);
}

double PathTree::payoff(const PolicyFn& u, const StopFn& stop, int slice, int index) const {
  if (slice == steps_ || stop(slice, index)) return g(index);
  const std::size_t a = u(slice, index);
  double c = h(slice, index, a) * dt_;
  for (auto [j, p] : kernel(slice, index, a)) c += p * payoff(u, stop, slice + 1, j);
  return c;
}

double PathTree::horizon(const PolicyFn* u, const std::function<double(int)>& f, int to, int slice, int index) const {
  if (slice == to) return f(index);
  double best = INFINITY;
  for (std::size_t a = 0; a < spec_.actions.size(); ++a) {
    if (u && (*u)(slice, index) != a) continue;
    double c = h(slice, index, a) * dt_;
    for (auto [j, p] : kernel(slice, index, a)) c += p * horizon(u, f, to, slice + 1, j);
    best = std::min(best, c);
  }
  return best;
}

double PathTree::payoff_by_paths(const PolicyFn& u, const StopFn& stop) const {
  struct Frame {
    int slice, index;
    double prob, running;
  };
  std::vector<Frame> stack{{0, root_, 1.0, 0.0}};
  double total = 0.0;
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    if (fr.slice == steps_ || stop(fr.slice, fr.index)) {
      total += fr.prob * (fr.running + g(fr.index));
      continue;
    }
    const std::size_t a = u(fr.slice, fr.index);
    const double run = fr.running + h(fr.slice, fr.index, a) * dt_;
    for (auto [j, p] : kernel(fr.slice, fr.index, a)) {
      if (p > 0.0) stack.push_back({fr.slice + 1, j, fr.prob * p, run});
    }
  }
  return total;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

double euler_quadrature(const sdgame::GameSpec& spec, int steps, int nodes, const PolicyFn& u, const StopFn& stop,
                        int points_per_piece, double width_sd) {
  const double dt = spec.horizon / steps;
  const double lo = spec.state_box.lower(0);
  const double dx = (spec.state_box.upper(0) - lo) / (nodes - 1);
  const auto [gx, gw] = gauss_legendre(points_per_piece);
  auto nearest = [&](double x) { return std::clamp(static_cast<int>(std::lround((x - lo) / dx)), 0, nodes - 1); };

  std::function<double(int, double)> rec = [&](int slice, double x) -> double {
    const sdgame::Vector xv = sdgame::Vector::Constant(1, x);
    const int i = nearest(x);
    if (slice == steps || stop(slice, i)) return spec.terminal_reward(xv);
    const double t = slice * dt;
    const sdgame::Vector& a = spec.actions[u(slice, i)];
    const double mean = x + spec.drift(t, xv, a)(0) * dt;
    const double sd = spec.sigma(t, xv)(0, 0) * std::sqrt(dt);
    const double run = spec.running_reward(t, xv, a) * dt;
    const double left = mean - width_sd * sd, right = mean + width_sd * sd;
    std::vector<double> cuts{left, right};
    for (double k = std::ceil((left - lo) / (0.5 * dx)); lo + k * 0.5 * dx < right; k += 1.0) {
      cuts.push_back(lo + k * 0.5 * dx);
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a0 = cuts[c], b0 = cuts[c + 1];
      if (b0 <= a0) continue;
      const double half = 0.5 * (b0 - a0), mid = 0.5 * (a0 + b0);
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double y = mid + half * gx[k];
        const double z = (y - mean) / sd;
        const double dens = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
        acc += gw[k] * half * dens * rec(slice + 1, y);
      }
    }
    return run + acc;
  };
  return rec(0, spec.initial_state(0));
}

}  // namespace sdtest
