#pragma once

// The two-sorted construction. Mothers start paths f_i (sort 0) and g_j
// (sort 1), daughters extend them one value at a time while watching
// phi(n, .), U-strategies steal path strings to defeat a functional, and
// the M-strategies work on pairs (sigma, a).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cubecode/adversary.hpp"
#include "cubecode/engine.hpp"
#include "cubecode/functional.hpp"
#include "cubecode/m_strategy.hpp"
#include "cubecode/ordering.hpp"
#include "cubecode/window.hpp"

namespace cubecode {

struct DcConfig {
  DcShape shape;
  std::vector<Requirement> ordering;  // default_dc_ordering(shape) when empty
  WindowParams window;
  PhiPredicate phi;
  std::vector<Functional> functionals;  // Phi_e
  Nat witness_base = 1000;
  std::size_t witness_search_cap = 100000;  // combinations tried per U visit
};

class DcConstruction : public Construction {
 public:
  DcConstruction(DcConfig config, std::vector<std::unique_ptr<Adversary>> adversaries,
                 Trace& trace);

  std::string assign_type(const NodeStore& nodes, NodeId id, Nat stage) override;
  Outcome visit(const NodeStore& nodes, NodeId id, Nat stage) override;
  void end_stage(const NodeStore& nodes, Nat stage) override;

  const LabelStore& store() const { return *store_; }
  std::shared_ptr<const LabelStore> shared_store() const { return store_; }
  const StringWindow& window() const { return window_; }
  const HaltingSim& halting() const { return halting_; }
  const DcConfig& config() const { return config_; }
  Adversary& adversary(Nat i) { return *adversaries_.at(i); }
  std::size_t adversary_count() const { return adversaries_.size(); }
  const MState* m_state(NodeId id) const;

  /// The string inherited by a daughter, per the largest qualifying
  /// ancestor. Throws unresolved when there is none.
  NatString resolve_gamma(const NodeStore& nodes, NodeId id) const;
  /// Largest n such that the mother `psi` has a daughter strictly above
  /// `tau`; 0 if none.
  Nat daughters_above(const NodeStore& nodes, NodeId tau, NodeId psi) const;
  /// Types `tau` may not take because of frozen U-strategies above it.
  std::vector<Requirement> blocked_types(const NodeStore& nodes, NodeId tau) const;

 private:
  struct NodeState {
    Requirement req;
    // mother
    Nat v = 0;
    bool started = false;
    // daughter
    std::map<Outcome, NatString> sigma;
    Nat inf_count = 0;
    Nat last_inf = 0;
    // U
    bool active = false;
    std::vector<NodeId> C;
    Nat witness = 0;
    bool frozen = false;
    std::map<NodeId, NatString> stolen;
    Nat ell = 0;
    // M
    MState m;
  };

  Nat fresh(Nat stage);
  std::optional<NodeId> mother_of(const NodeStore& nodes, NodeId id, Nat r, Nat a) const;
  bool allowed(const NodeStore& nodes, NodeId tau, const Requirement& req) const;
  void grow(NodeId id, const StringKey& key, Nat stage);
  void choose(NodeId id, const StringKey& key, Nat stage, bool stolen);
  Outcome visit_mother(NodeId id, NodeState& st, Nat stage);
  Outcome visit_daughter(const NodeStore& nodes, NodeId id, NodeState& st, Nat stage);
  Outcome visit_u(const NodeStore& nodes, NodeId id, NodeState& st, Nat stage);
  Outcome visit_m(const NodeStore& nodes, NodeId id, NodeState& st, Nat stage);
  std::set<StringKey> m_fixed_pairs(const NodeStore& nodes, NodeId id) const;

  DcConfig config_;
  std::vector<std::unique_ptr<Adversary>> adversaries_;
  Trace& trace_;
  std::shared_ptr<LabelStore> store_;
  StringWindow window_;
  HaltingSim halting_;
  std::map<NodeId, NodeState> state_;
  std::vector<NodeId> daughters_;  // nodes that have defined some sigma(tau, beta)
  std::map<StringKey, std::vector<NodeId>> choosers_;
  Nat next_fresh_ = 0;
};

// --- analysis ----------------------------------------------------------------

struct PathPrefix {
  NodeId mother = 0;
  Nat r = 0;
  Nat a = 0;
  Nat v = 0;
  NatString prefix;
  /// Positions n of the prefix set by a frozen U on the path, with that U.
  std::map<Nat, NodeId> by_u;
};

struct ExtractedPaths {
  std::vector<PathPrefix> paths;
  const PathPrefix* f(Nat i) const;  // sort 0, v = i
  const PathPrefix* g(Nat j) const;  // sort 1, v = j
  const PathPrefix* by_mother(NodeId id) const;
};

/// Unions of sigma(tau, alpha) over daughters tau with tau^alpha on the
/// true-path approximation. Throws inconsistent_prefixes when they do not
/// form a chain.
ExtractedPaths extract_paths(const Trace& trace, Nat horizon, TruePathParams params = {});

struct ModulusVerdict {
  bool checked = false;  // false when n is declared in Z
  bool ok = true;
  Nat bound = 0;         // f_i(n) + g_j(n)
  std::string detail;
};

/// For n outside Z: no s in (f_i(n) + g_j(n), horizon] has phi(n, s).
/// Throws out_of_range when n is outside phi's declared range or a path is
/// missing or too short.
ModulusVerdict modulus_check(Nat i, Nat j, Nat n, const ExtractedPaths& paths,
                             const PhiPredicate& phi, Nat horizon);
ModulusVerdict modulus_check(Nat i, Nat j, Nat n, const Trace& trace, const PhiPredicate& phi,
                             Nat horizon);

struct DiagonalizationReport {
  NodeId node = 0;
  Nat i = 0;
  Nat e = 0;
  bool active = false;
  bool frozen = false;
  Nat witness = 0;
  std::optional<Nat> frozen_at;
  bool witness_enumerated = false;
  /// Phi_e on the extracted prefixes at the witness, with the horizon as
  /// step budget.
  std::optional<Nat> output;
  /// Frozen, witness enumerated and the output is 0; or not frozen and no
  /// halting with 0.
  bool consistent = false;
};

/// One report per U-strategy on the true-path approximation.
std::vector<DiagonalizationReport> check_diagonalization(
    const Trace& trace, const std::vector<Functional>& functionals, Nat horizon,
    TruePathParams params = {});

/// The named constants of the final structure.
struct FinalStructure {
  StructureSnapshot snapshot;
  ElementId c;  // u_0
  ElementId d;  // v_0 = (0, <>, 1)
  CubeElem v(const FinSet& F) const { return {F, {}, Sort::one}; }
};

FinalStructure assemble_final_structure(const StructureSnapshot& snapshot);

}  // namespace cubecode
