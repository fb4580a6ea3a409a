#include "sdgame/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdgame/error.hpp"

namespace sdgame {

namespace {

constexpr double kNegativeSlack = 1e-14;
constexpr std::size_t kMaxNodes = std::size_t{1} << 26;

struct AxisMove {
  int offset;
  double prob;
};

}  // namespace

nlohmann::json to_json(const LatticeSummary& s) {
  std::vector<double> dx(s.dx.data(), s.dx.data() + s.dx.size());
  return nlohmann::json{{"dim", s.dim},
                        {"steps", s.steps},
                        {"nodes_per_dim", s.nodes_per_dim},
                        {"node_count", s.node_count},
                        {"action_count", s.action_count},
                        {"transition_entries", s.transition_entries},
                        {"dt", s.dt},
                        {"dx", dx},
                        {"root", s.root},
                        {"root_offset", s.root_offset},
                        {"max_variance_ratio", s.max_variance_ratio},
                        {"max_drift_ratio", s.max_drift_ratio},
                        {"cfl_margin", s.cfl_margin}};
}

Vector Lattice::coordinates(NodeId node) const {
  const auto idx = grid_index(node);
  Vector x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = spec_->state_box.lower[i] + idx[i] * dx_[i];
  return x;
}

std::vector<int> Lattice::grid_index(NodeId node) const {
  std::vector<int> idx(static_cast<std::size_t>(dim()));
  std::size_t rest = node;
  for (int i = dim() - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
  }
  return idx;
}

NodeId Lattice::node_at(const std::vector<int>& index) const {
  std::size_t id = 0;
  for (int i = 0; i < dim(); ++i) {
    if (index[i] < 0 || index[i] >= nodes_per_dim_) throw Error("lattice", "grid index out of range");
    id += static_cast<std::size_t>(index[i]) * strides_[i];
  }
  return static_cast<NodeId>(id);
}

NodeId Lattice::nearest_node(const Vector& x) const {
  std::size_t id = 0;
  for (int i = 0; i < dim(); ++i) {
    const double r = std::round((x[i] - spec_->state_box.lower[i]) / dx_[i]);
    const int k = static_cast<int>(std::clamp(r, 0.0, static_cast<double>(nodes_per_dim_ - 1)));
    id += static_cast<std::size_t>(k) * strides_[i];
  }
  return static_cast<NodeId>(id);
}

bool Lattice::on_boundary(NodeId node) const {
  for (int k : grid_index(node)) {
    if (k == 0 || k == nodes_per_dim_ - 1) return true;
  }
  return false;
}

std::optional<NodeId> Lattice::neighbor(NodeId node, int axis, int offset) const {
  auto idx = grid_index(node);
  const int k = idx[axis] + offset;
  if (k < 0 || k >= nodes_per_dim_) return std::nullopt;
  idx[axis] = k;
  return node_at(idx);
}

std::span<const Outcome> Lattice::transition(int slice, NodeId node, std::size_t action) const {
  if (slice < 0 || slice >= steps_) {
    throw Error("lattice", "slice " + std::to_string(slice) + " outside [0, " + std::to_string(steps_) + ")");
  }
  if (node >= node_count_) throw Error("lattice", "node " + std::to_string(node) + " out of range");
  if (action >= action_count()) throw Error("lattice", "action index " + std::to_string(action) + " out of range");
  return kernel(slice, node, action);
}

std::span<const Outcome> Lattice::transition(int slice, NodeId node, const Vector& action) const {
  auto idx = find_action(*spec_, action);
  if (!idx) throw Error("lattice", "action not in the action set");
  return transition(slice, node, *idx);
}

Lattice build_lattice(const GameSpec& spec, int steps, int nodes_per_dim) {
  return build_lattice(std::make_shared<const GameSpec>(spec), steps, nodes_per_dim);
}

Lattice build_lattice(std::shared_ptr<const GameSpec> spec_ptr, int steps, int nodes_per_dim) {
  if (!spec_ptr) throw Error("lattice", "null spec");
  const GameSpec& spec = *spec_ptr;
  if (steps < 1) throw Error("lattice", "steps must be >= 1");
  if (nodes_per_dim < 3) throw Error("lattice", "nodes_per_dim must be >= 3");
  if (spec.dim < 1 || spec.state_box.lower.size() != spec.dim || spec.state_box.upper.size() != spec.dim) {
    throw Error("lattice", "state_box does not match dim");
  }
  if (spec.actions.empty()) throw Error("lattice", "empty action set");
  if (!spec.state_box.contains(spec.initial_state)) {
    throw Error("lattice", "state_box too small to contain initial_state");
  }

  Lattice lat;
  lat.spec_ = spec_ptr;
  lat.steps_ = steps;
  lat.nodes_per_dim_ = nodes_per_dim;
  lat.dt_ = spec.horizon / steps;
  const int n = spec.dim;
  lat.dx_ = (spec.state_box.upper - spec.state_box.lower) / static_cast<double>(nodes_per_dim - 1);

  lat.strides_.assign(static_cast<std::size_t>(n), 1);
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    lat.strides_[i] = count;
    if (count > kMaxNodes / static_cast<std::size_t>(nodes_per_dim)) {
      throw Error("lattice", "grid too large: nodes_per_dim^dim exceeds " + std::to_string(kMaxNodes));
    }
    count *= static_cast<std::size_t>(nodes_per_dim);
  }
  lat.node_count_ = count;
  lat.root_ = lat.nearest_node(spec.initial_state);

  const std::size_t actions = spec.actions.size();
  const double dt = lat.dt_;
  const std::size_t keys = static_cast<std::size_t>(steps) * count * actions;
  lat.offsets_.reserve(keys + 1);
  lat.offsets_.push_back(0);
  lat.h_.resize(keys);
  lat.g_.resize(count);

  double max_q = 0.0;
  double max_m = 0.0;
  double admissible_dt = std::numeric_limits<double>::infinity();
  double worst_peclet = 0.0;
  double required_dx = std::numeric_limits<double>::infinity();
  double worst_corr = 0.0;

  for (std::size_t node = 0; node < count; ++node) {
    lat.g_[node] = spec.terminal_reward(lat.coordinates(static_cast<NodeId>(node)));
  }

  std::vector<std::array<AxisMove, 3>> moves(static_cast<std::size_t>(n));
  std::vector<Outcome> merged;
  for (int s = 0; s < steps; ++s) {
    const double t = lat.time(s);
    for (std::size_t node = 0; node < count; ++node) {
      const Vector x = lat.coordinates(static_cast<NodeId>(node));
      const auto idx = lat.grid_index(static_cast<NodeId>(node));
      const Matrix sig = spec.sigma(t, x);
      const Matrix cov = sig * sig.transpose();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j) worst_corr = std::max(worst_corr, std::abs(cov(i, j)) / (1.0 + cov.cwiseAbs().maxCoeff()));
        }
      }
      for (std::size_t a = 0; a < actions; ++a) {
        const Vector f = spec.drift(t, x, spec.actions[a]);
        lat.h_[(static_cast<std::size_t>(s) * count + node) * actions + a] =
            spec.running_reward(t, x, spec.actions[a]);
        for (int i = 0; i < n; ++i) {
          const double var = cov(i, i);
          const double q = var * dt / (lat.dx_[i] * lat.dx_[i]);
          const double m = f[i] * dt / lat.dx_[i];
          max_q = std::max(max_q, q);
          max_m = std::max(max_m, std::abs(m));
          if (var > 0.0) admissible_dt = std::min(admissible_dt, lat.dx_[i] * lat.dx_[i] / var);
          if (f[i] != 0.0) {
            admissible_dt = std::min(admissible_dt, lat.dx_[i] / std::abs(f[i]));
            required_dx = std::min(required_dx, var / std::abs(f[i]));
            worst_peclet = std::max(worst_peclet, std::abs(f[i]) * lat.dx_[i] / std::max(var, 1e-300));
          }
          double up = 0.5 * (q + m);
          double down = 0.5 * (q - m);
          double mid = 1.0 - q;
          for (double* p : {&up, &down, &mid}) {
            if (*p < 0.0 && *p > -kNegativeSlack) *p = 0.0;
          }
          moves[i] = {AxisMove{-1, down}, AxisMove{0, mid}, AxisMove{+1, up}};
        }

        // product of per-axis moves; off-grid moves are clamped onto the node itself
        merged.clear();
        std::size_t combos = 1;
        for (int i = 0; i < n; ++i) combos *= 3;
        for (std::size_t c = 0; c < combos; ++c) {
          std::size_t rest = c;
          double prob = 1.0;
          std::size_t target = 0;
          for (int i = 0; i < n; ++i) {
            const AxisMove& mv = moves[i][rest % 3];
            rest /= 3;
            prob *= mv.prob;
            const int k = std::clamp(idx[i] + mv.offset, 0, nodes_per_dim - 1);
            target += static_cast<std::size_t>(k) * lat.strides_[i];
          }
          if (prob == 0.0) continue;
          auto it = std::find_if(merged.begin(), merged.end(),
                                 [&](const Outcome& o) { return o.node == target; });
          if (it == merged.end()) {
            merged.push_back(Outcome{static_cast<NodeId>(target), prob});
          } else {
            it->prob += prob;
          }
        }
        std::sort(merged.begin(), merged.end(), [](const Outcome& l, const Outcome& r) { return l.node < r.node; });
        lat.outcomes_.insert(lat.outcomes_.end(), merged.begin(), merged.end());
        lat.offsets_.push_back(lat.outcomes_.size());
      }
    }
  }

  if (worst_corr > 1e-12) {
    throw Error("lattice", "sigma sigma^T has nonzero off-diagonal entries; only diagonal covariance is supported");
  }
  if (max_q > 1.0 + 1e-12 || max_m > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "CFL violation: dt=" << dt << " gives variance ratio " << max_q << " and drift ratio " << max_m
       << "; maximal admissible dt is " << admissible_dt << " (steps >= "
       << static_cast<long long>(std::ceil(spec.horizon / admissible_dt)) << ")";
    throw Error("lattice", os.str());
  }
  if (worst_peclet > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "negative transition probability: |f| dx exceeds sigma^2 by factor " << worst_peclet
       << "; grid spacing must be <= " << required_dx;
    throw Error("lattice", os.str());
  }

  LatticeSummary& sum = lat.summary_;
  sum.dim = n;
  sum.steps = steps;
  sum.nodes_per_dim = nodes_per_dim;
  sum.node_count = count;
  sum.action_count = actions;
  sum.transition_entries = lat.outcomes_.size();
  sum.dt = dt;
  sum.dx = lat.dx_;
  sum.root = lat.root_;
  sum.root_offset = (lat.coordinates(lat.root_) - spec.initial_state).norm();
  sum.max_variance_ratio = max_q;
  sum.max_drift_ratio = max_m;
  sum.cfl_margin = 1.0 - std::max(max_q, max_m);
  return lat;
}

}  // namespace sdgame
