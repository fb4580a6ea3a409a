#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "sdgame/model.hpp"

namespace sdgame {

using NodeId = std::uint32_t;

struct Outcome {
  NodeId node;
  double prob;
};

struct LatticeSummary {
  int dim = 0;
  int steps = 0;
  int nodes_per_dim = 0;
  std::size_t node_count = 0;
  std::size_t action_count = 0;
  std::size_t transition_entries = 0;
  double dt = 0.0;
  Vector dx;
  NodeId root = 0;
  double root_offset = 0.0;  // distance from initial_state to the root node
  double max_variance_ratio = 0.0;  // max sigma_ii^2 dt / dx_i^2, must be <= 1
  double max_drift_ratio = 0.0;     // max |f_i| dt / dx_i, must be <= 1
  double cfl_margin = 0.0;          // 1 - max of the two ratios
};

nlohmann::json to_json(const LatticeSummary& summary);

/// Time-state Markov chain on a tensor grid inside the state box. For every
/// (slice, node, action) it stores a per-coordinate trinomial kernel whose
/// first moment is f dt and whose diagonal second moment is (sigma sigma^T)_ii dt.
/// Mass that would leave the box stays on the boundary node.
///
/// Immutable after construction; rewards g and h are cached per node.
class Lattice {
 public:
  int dim() const { return spec_->dim; }
  int steps() const { return steps_; }
  int slices() const { return steps_ + 1; }
  int nodes_per_dim() const { return nodes_per_dim_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t action_count() const { return spec_->actions.size(); }
  double dt() const { return dt_; }
  const Vector& dx() const { return dx_; }
  double time(int slice) const { return dt_ * slice; }
  NodeId root() const { return root_; }
  const GameSpec& spec() const { return *spec_; }
  std::shared_ptr<const GameSpec> spec_ptr() const { return spec_; }

  Vector coordinates(NodeId node) const;
  std::vector<int> grid_index(NodeId node) const;
  NodeId node_at(const std::vector<int>& index) const;
  /// Nearest grid node to an arbitrary state, clamped to the box.
  NodeId nearest_node(const Vector& x) const;
  /// True when some coordinate sits on the box edge.
  bool on_boundary(NodeId node) const;
  /// Neighbor along coordinate `axis` (offset -1 or +1); nullopt off the grid.
  std::optional<NodeId> neighbor(NodeId node, int axis, int offset) const;

  /// Stored kernel for (slice, node, action index). Throws on bad indices.
  std::span<const Outcome> transition(int slice, NodeId node, std::size_t action) const;
  /// Same kernel looked up by action value; throws when the action is unknown.
  std::span<const Outcome> transition(int slice, NodeId node, const Vector& action) const;

  double terminal_reward(NodeId node) const { return g_[node]; }
  double running_reward(int slice, NodeId node, std::size_t action) const {
    return h_[(static_cast<std::size_t>(slice) * node_count_ + node) * action_count() + action];
  }

  /// h dt + sum p * next[node'] for a stored kernel: the one-step continuation
  /// value every backward recursion uses, so all modules add in the same order.
  double continuation(int slice, NodeId node, std::size_t action, std::span<const double> next) const {
    double acc = running_reward(slice, node, action) * dt_;
    for (const Outcome& o : kernel(slice, node, action)) acc += o.prob * next[o.node];
    return acc;
  }

  LatticeSummary summary() const { return summary_; }

 private:
  friend Lattice build_lattice(std::shared_ptr<const GameSpec> spec, int steps, int nodes_per_dim);
  Lattice() = default;

  std::span<const Outcome> kernel(int slice, NodeId node, std::size_t action) const {
    const std::size_t key = (static_cast<std::size_t>(slice) * node_count_ + node) * action_count() + action;
    return {outcomes_.data() + offsets_[key], outcomes_.data() + offsets_[key + 1]};
  }

  std::shared_ptr<const GameSpec> spec_;
  int steps_ = 0;
  int nodes_per_dim_ = 0;
  std::size_t node_count_ = 0;
  double dt_ = 0.0;
  Vector dx_;
  NodeId root_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> offsets_;
  std::vector<Outcome> outcomes_;
  std::vector<double> g_;
  std::vector<double> h_;
  LatticeSummary summary_;
};

/// Builds the chain with dt = horizon / steps and dx_i = box width / (nodes_per_dim - 1).
///
/// Rejects: steps < 1, nodes_per_dim < 3, initial_state outside the box,
/// correlated noise (off-diagonal sigma sigma^T) and any kernel with a
/// negative probability. The admissibility conditions are
///   sigma_ii^2 dt <= dx_i^2,  |f_i| dt <= dx_i,  |f_i| dx_i <= sigma_ii^2,
/// checked at every (slice, node, action); violations report the largest
/// admissible dt or the required grid spacing.
Lattice build_lattice(std::shared_ptr<const GameSpec> spec, int steps, int nodes_per_dim);
Lattice build_lattice(const GameSpec& spec, int steps, int nodes_per_dim);

}  // namespace sdgame
