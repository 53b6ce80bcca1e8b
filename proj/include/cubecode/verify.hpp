#pragma once

// Checkers: both directions of the orbit / branch correspondence, the
// labeling property against Q, isomorphism checking against an opponent
// stream, a bounded back-and-forth test, and trace invariants.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cubecode/adversary.hpp"
#include "cubecode/labeled_structure.hpp"
#include "cubecode/trace.hpp"

namespace cubecode {

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string locus;  // node address, stage, element; empty when ok
  std::size_t failures = 0;
};

struct Report {
  std::vector<CheckResult> checks;

  bool ok() const;
  /// Records a failure under `name` (the first failure per name is kept in
  /// full, later ones only counted).
  void fail(const std::string& name, std::string locus);
  void pass(const std::string& name);
  const CheckResult* find(const std::string& name) const;
  /// `PASS name` / `FAIL name @ locus`, one per line.
  std::string str() const;
};

using ElementMap = std::function<CubeElem(const CubeElem&)>;

/// Color i -> a finite prefix of the branch h_i, which must extend sigma^i.
struct PathFamily {
  std::map<Nat, NatString> branches;
};

/// Strings whose cube carries the same nonempty label set at every vertex
/// inside the support: the tree the labels say is coded.
std::set<NatString> labeled_tree(const StructureSnapshot& snapshot,
                                 const std::vector<StringKey>& keys, Nat support);

/// The piecewise map moving (0, sigma) to (F, sigma). Evaluating it at the
/// last string of a supplied prefix throws out_of_range: the next symbol is
/// unknown there. Throws branch_outside_tree when a branch leaves `tree`.
ElementMap automorphism_from_paths(const PathFamily& paths, const FinSet& F,
                                   const NatString& sigma, const std::set<NatString>& tree);

/// Follows g from sigma^min(F) until the string has length `depth`.
/// Throws invariant_broken when g stops moving the empty vertex or breaks P
/// between consecutive strings; config_invalid when g(0, sigma) is not
/// (F, sigma) for a nonempty F.
NatString path_from_automorphism(const ElementMap& g, const NatString& sigma, Nat depth);

/// True iff some string of `tree` of length `depth` extends sigma^i.
bool orbit_probe(const NatString& sigma, Nat i, const std::set<NatString>& tree, Nat depth);

struct IsoCheck {
  bool ok = true;
  std::string failure;
  std::size_t elements = 0;
  std::size_t facts = 0;
};

/// g sends source elements to target numbers. Checks injectivity and that
/// W, E, P agree both ways on the domain; a source label stamped at `st`
/// must be in the target by max(st, target age) + lag whenever that is
/// within the horizon, and every target label must be in the source.
IsoCheck check_isomorphism(const std::map<CubeElem, Nat>& g, const StructureSnapshot& source,
                           const FactStream& target, Nat horizon, Nat lag = 0);

/// Self-map form: composes `map` with the materialization of `keys`.
IsoCheck check_automorphism(const ElementMap& map, const StructureSnapshot& snapshot,
                            const std::vector<StringKey>& keys, Nat support);

/// Labels of chosen strings keep growing between the two horizons; strings
/// in range(early) that nobody chose by then have the same n_sigma at both
/// horizons and carry S_{n_sigma} on the empty vertex only.
Report check_labeling(const Trace& trace, const std::set<NatString>& chosen, Nat early, Nat late);

struct BfResult {
  bool equivalent = false;
  Nat alpha = 0;
  Nat support = 0;  // witnesses range over vertices inside this bound
  std::size_t universe = 0;
};

/// Bounded back-and-forth: one-element extensions over the snapshot cubes
/// of `keys` with vertices inside `support`. An approximation: a negative
/// answer can change when the bound grows.
BfResult bf_equiv(const std::vector<CubeElem>& a, const std::vector<CubeElem>& b, Nat alpha,
                  const StructureSnapshot& snapshot, const std::vector<StringKey>& keys,
                  Nat support);

/// Named checks: b-monotone, b-equal, left-kill, n-sigma-defined,
/// g-coverage, choose-once (cc) / steal-only-by-u (dc), gamma-length.
Report check_trace_invariants(const Trace& trace);

}  // namespace cubecode
