#include "sdgame/policy.hpp"

#include <algorithm>
#include <random>

#include "sdgame/error.hpp"

namespace sdgame {

Policy::Policy(const Lattice& lattice, std::size_t action)
    : table_(lattice.steps(), lattice.node_count(), static_cast<std::uint32_t>(action)) {
  if (action >= lattice.action_count()) throw Error("snell", "constant policy action index out of range");
}

Policy Policy::uniform_random(const Lattice& lattice, std::uint64_t seed) {
  Policy p(lattice, 0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, lattice.action_count() - 1);
  for (int s = 0; s < lattice.steps(); ++s) {
    for (std::size_t n = 0; n < lattice.node_count(); ++n) p.set(s, static_cast<NodeId>(n), pick(rng));
  }
  return p;
}

bool Policy::valid_for(const Lattice& lattice) const {
  if (table_.slices() != lattice.steps() || table_.nodes() != lattice.node_count()) return false;
  for (auto a : table_.data()) {
    if (a >= lattice.action_count()) return false;
  }
  return true;
}

void Policy::require_valid(const Lattice& lattice, const char* module) const {
  if (!valid_for(lattice)) throw Error(module, "policy is not total on this lattice or references unknown actions");
}

StoppingRule::StoppingRule(const Lattice& lattice, bool stop_before_terminal)
    : table_(lattice.slices(), lattice.node_count(), stop_before_terminal ? 1 : 0) {
  for (auto& v : table_.row(lattice.steps())) v = 1;
}

StoppingRule StoppingRule::stop_from_slice(const Lattice& lattice, int slice) {
  StoppingRule rule(lattice, false);
  for (int s = std::max(slice, 0); s < lattice.slices(); ++s) {
    for (auto& v : rule.table_.row(s)) v = 1;
  }
  return rule;
}

StoppingRule StoppingRule::uniform_random(const Lattice& lattice, std::uint64_t seed) {
  StoppingRule rule(lattice, false);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < lattice.steps(); ++s) {
    for (auto& v : rule.table_.row(s)) v = coin(rng) ? 1 : 0;
  }
  return rule;
}

void StoppingRule::set(int slice, NodeId node, bool stop) {
  if (slice == table_.slices() - 1) stop = true;
  table_(slice, node) = stop ? 1 : 0;
}

bool StoppingRule::valid_for(const Lattice& lattice) const {
  if (table_.slices() != lattice.slices() || table_.nodes() != lattice.node_count()) return false;
  for (auto v : table_.row(lattice.steps())) {
    if (!v) return false;
  }
  return true;
}

void StoppingRule::require_valid(const Lattice& lattice, const char* module) const {
  if (!valid_for(lattice)) throw Error(module, "stopping rule does not match the lattice or fails to stop at the horizon");
}

std::size_t StoppingRule::stop_count() const {
  std::size_t count = 0;
  for (int s = 0; s + 1 < table_.slices(); ++s) {
    for (auto v : table_.row(s)) count += v;
  }
  return count;
}

}  // namespace sdgame
