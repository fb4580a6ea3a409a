#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdgame/lattice.hpp"

namespace sdgame {

/// Dense (slice, node) table. Row `slice` is a contiguous span of node values.
template <typename T>
class SliceTable {
 public:
  SliceTable() = default;
  SliceTable(int slices, std::size_t nodes, T fill = T{})
      : slices_(slices), nodes_(nodes), data_(static_cast<std::size_t>(slices) * nodes, fill) {}

  int slices() const { return slices_; }
  std::size_t nodes() const { return nodes_; }

  T& operator()(int slice, NodeId node) { return data_[index(slice, node)]; }
  const T& operator()(int slice, NodeId node) const { return data_[index(slice, node)]; }

  std::span<T> row(int slice) { return {data_.data() + static_cast<std::size_t>(slice) * nodes_, nodes_}; }
  std::span<const T> row(int slice) const {
    return {data_.data() + static_cast<std::size_t>(slice) * nodes_, nodes_};
  }

  const std::vector<T>& data() const { return data_; }
  bool operator==(const SliceTable&) const = default;

 private:
  std::size_t index(int slice, NodeId node) const { return static_cast<std::size_t>(slice) * nodes_ + node; }

  int slices_ = 0;
  std::size_t nodes_ = 0;
  std::vector<T> data_;
};

/// Markov control: an action index at every non-terminal (slice, node).
class Policy {
 public:
  Policy() = default;
  /// Constant policy over `lattice`.
  Policy(const Lattice& lattice, std::size_t action);

  static Policy uniform_random(const Lattice& lattice, std::uint64_t seed);

  int steps() const { return table_.slices(); }
  std::size_t nodes() const { return table_.nodes(); }
  std::size_t operator()(int slice, NodeId node) const { return table_(slice, node); }
  void set(int slice, NodeId node, std::size_t action) { table_(slice, node) = static_cast<std::uint32_t>(action); }

  /// True when the policy table matches the lattice shape and every entry
  /// indexes an action of the spec.
  bool valid_for(const Lattice& lattice) const;
  /// Throws sdgame::Error(module, ...) when not valid_for(lattice).
  void require_valid(const Lattice& lattice, const char* module) const;

  bool operator==(const Policy&) const = default;

 private:
  SliceTable<std::uint32_t> table_;
};

/// Markov stopping decision at every (slice, node). The terminal slice always stops.
class StoppingRule {
 public:
  StoppingRule() = default;
  /// Rule that stops at the terminal slice and wherever `stop_before_terminal` says.
  StoppingRule(const Lattice& lattice, bool stop_before_terminal);

  /// Stop at every node of slices >= `slice`.
  static StoppingRule stop_from_slice(const Lattice& lattice, int slice);
  static StoppingRule uniform_random(const Lattice& lattice, std::uint64_t seed);

  int slices() const { return table_.slices(); }
  std::size_t nodes() const { return table_.nodes(); }
  bool stops(int slice, NodeId node) const { return table_(slice, node) != 0; }
  /// Sets a decision; terminal-slice entries are pinned to stop.
  void set(int slice, NodeId node, bool stop);

  bool valid_for(const Lattice& lattice) const;
  void require_valid(const Lattice& lattice, const char* module) const;
  /// Number of stop entries on non-terminal slices.
  std::size_t stop_count() const;

  bool operator==(const StoppingRule&) const = default;

 private:
  SliceTable<std::uint8_t> table_;
};

}  // namespace sdgame
