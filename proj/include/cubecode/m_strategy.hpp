#pragma once

// The diagonalization strategy against one opponent structure, shared by
// both variants. Each visit either finds the opponent lagging behind the
// strings it can see (finite outcome) or commits to the current images of
// the strings chosen above it (one of the infinite outcomes).

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cubecode/adversary.hpp"
#include "cubecode/labeled_structure.hpp"
#include "cubecode/trace.hpp"

namespace cubecode {

struct MState {
  Nat adversary = 0;
  std::set<StringKey> C;
  std::map<StringKey, Nat> f;
  // x value per sigma in C, one entry per infinite-outcome stage
  std::map<StringKey, std::map<Nat, std::optional<Nat>>> x;
  std::set<StringKey> last_B;
  std::set<StringKey> last_D;
  Nat k0 = 0;  // infinite outcomes so far
  Nat k1 = 0;  // inf-inf outcomes so far
  Nat t = 0;   // last infinite-outcome stage

  std::optional<Nat> x_at(const StringKey& sigma, Nat stage) const;
};

struct MContext {
  const LabelStore& store;
  const Adversary& adversary;
  /// Keys of range(t), window order.
  std::vector<StringKey> range_keys;
  /// True iff `key` was chosen at some point by a node extending tau^o.
  std::function<bool(const StringKey& key, const Outcome& o)> chosen_below;
  Trace& trace;
  NodeId id = 0;
  Nat stage = 0;
};

/// Children sigma^j of `sigma` inside `pool`.
std::vector<StringKey> children_in(const StringKey& sigma, const std::set<StringKey>& pool);

Outcome m_visit(MState& state, const MContext& ctx);

}  // namespace cubecode
