#pragma once

// The single-sorted construction: a computably categorical structure
// coding an input tree T. N-strategies pick images for the strings of T
// and keep growing them, M-strategies fight the opponent copies, and G
// marks every string nobody chose with S_0.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cubecode/adversary.hpp"
#include "cubecode/engine.hpp"
#include "cubecode/m_strategy.hpp"
#include "cubecode/ordering.hpp"
#include "cubecode/window.hpp"

namespace cubecode {

struct CcConfig {
  std::vector<NatString> tree;  // prefix closed, finite
  std::vector<Requirement> ordering;  // default_cc_ordering when empty
  WindowParams window;
};

class CcConstruction : public Construction {
 public:
  CcConstruction(CcConfig config, std::vector<std::unique_ptr<Adversary>> adversaries,
                 Trace& trace);

  std::string assign_type(const NodeStore& nodes, NodeId id, Nat stage) override;
  Outcome visit(const NodeStore& nodes, NodeId id, Nat stage) override;
  void end_stage(const NodeStore& nodes, Nat stage) override;

  const LabelStore& store() const { return *store_; }
  std::shared_ptr<const LabelStore> shared_store() const { return store_; }
  const StringWindow& window() const { return window_; }
  const std::vector<Requirement>& ordering() const { return config_.ordering; }
  Adversary& adversary(Nat i) { return *adversaries_.at(i); }
  std::size_t adversary_count() const { return adversaries_.size(); }
  const MState* m_state(NodeId id) const;
  std::optional<NatString> chosen_by(NodeId id) const;

 private:
  struct NodeState {
    Requirement req;
    std::optional<NatString> chosen;
    Nat chosen_at = 0;
    MState m;
  };

  Nat fresh(Nat stage);
  bool chosen_below(const NodeStore& nodes, NodeId tau, const StringKey& key,
                    const Outcome& o) const;

  CcConfig config_;
  std::vector<std::unique_ptr<Adversary>> adversaries_;
  Trace& trace_;
  std::shared_ptr<LabelStore> store_;
  StringWindow window_;
  std::map<NodeId, NodeState> state_;
  std::map<NatString, std::vector<NodeId>> choosers_;
  Nat next_fresh_ = 0;
};

// --- analysis ----------------------------------------------------------------

struct TreeQ {
  std::map<NatString, NatString> phi;  // input string -> chosen string
  std::map<NatString, NodeId> chooser;
};

/// Images of the input strings whose N-strategies lie on the true-path
/// approximation at `horizon`.
TreeQ compute_Q(const Trace& trace, Nat horizon, TruePathParams params = {});

struct Extraction {
  NodeId node = 0;
  std::map<StringKey, Nat> f;  // f_tau, extended over C_tau
  std::map<CubeElem, Nat> g;
  std::vector<CubeElem> stalled;
  bool optimistic = false;  // no ground truth: x used as is
};

/// Builds g for the M-node `node` from its F / X / MC events, with the
/// adversary's ground truth as the nonuniform input. g is defined on every
/// element (F, sigma) with sigma in range(horizon) of the replayed window
/// and F inside the support.
Extraction extract_isomorphism(const Trace& trace, NodeId node, const Adversary& adversary,
                               Nat horizon);

/// The two expansions by a_even / a_odd and the constant c.
struct DimensionTwo {
  std::string reduct;  // shared c-free part, one fact per line
  std::string b0;      // reduct + "c a_even"
  std::string b1;      // reduct + "c a_odd"
  std::string reduct_of_b0;  // b0 with the constant line removed
  std::string reduct_of_b1;
};

DimensionTwo extend_to_dimension_two(const StructureSnapshot& snapshot,
                                     const std::vector<StringKey>& keys, Nat support);

}  // namespace cubecode
