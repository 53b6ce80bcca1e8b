#pragma once

// The stage loop over a dynamically typed tree of strategies, and the
// finite-horizon analyses of the resulting visit pattern.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cubecode/trace.hpp"

namespace cubecode {

/// What a construction plugs into the engine. Node state lives in the
/// construction, keyed by node id.
class Construction {
 public:
  virtual ~Construction() = default;
  virtual void begin_stage(const NodeStore&, Nat) {}
  /// Called at a node's first visit; returns its type token.
  virtual std::string assign_type(const NodeStore& nodes, NodeId id, Nat stage) = 0;
  virtual Outcome visit(const NodeStore& nodes, NodeId id, Nat stage) = 0;
  /// Runs the global strategy.
  virtual void end_stage(const NodeStore& nodes, Nat stage) = 0;
};

class Engine {
 public:
  Engine(Construction& construction, Trace& trace);

  /// Stages 1..horizon. At stage s the nodes at depths 0..s are visited.
  void run(Nat horizon);
  void run_stage(Nat stage);

  const NodeStore& nodes() const { return nodes_; }
  Nat stage() const { return stage_; }

 private:
  Construction& construction_;
  Trace& trace_;
  NodeStore nodes_;
  Nat stage_ = 0;
};

struct TruePathParams {
  std::size_t recent = 50;
  std::size_t threshold = 3;
};

struct PathStep {
  NodeId node = 0;
  std::string type;
  std::size_t visits = 0;
  std::optional<Outcome> outcome;  // absent at the end of the path
  std::size_t support = 0;         // occurrences among the recent visits
};

/// From the root, repeatedly follows the leftmost outcome seen at least
/// `threshold` times among the node's last `recent` visits up to `horizon`.
std::vector<PathStep> true_path_approx(const NodeStore& nodes, Nat horizon,
                                       TruePathParams params = {});

struct LeftKillReport {
  bool ok = true;
  std::optional<NodeId> node;  // first node revisited after being passed on the left
  Nat stage = 0;
};

/// True iff no node is visited again once some path strictly to its left
/// has been visited after it.
LeftKillReport check_left_kill(const TraceIndex& index);

}  // namespace cubecode
