#pragma once

// The two-argument predicate phi(n, s) whose infinitely-often set is the
// coded Z, and the small library of step-bounded oracle functionals the
// U-strategies diagonalize against.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubecode/labeled_structure.hpp"

namespace cubecode {

/// Behaviour of phi(n, .) for one n.
struct PhiRow {
  enum class Kind { until, periodic, never };
  Kind kind = Kind::until;
  Nat value = 0;  // s0 for until (true exactly below it), period for periodic

  bool holds(Nat s) const;
  /// Declared membership in Z: phi(n, .) holds infinitely often.
  bool in_Z() const { return kind == Kind::periodic; }
  /// Last stage with phi(n, s) true is below this; absent for members of Z.
  std::optional<Nat> s0() const;
};

/// `until:12`, `periodic:3`, `never`.
std::string format_phi_row(const PhiRow& row);
PhiRow parse_phi_row(std::string_view text);

class PhiPredicate {
 public:
  PhiPredicate() = default;
  /// Rows for n < rows.size(); every larger n behaves as `never`.
  explicit PhiPredicate(std::vector<PhiRow> rows) : rows_(std::move(rows)) {}

  bool holds(Nat n, Nat s) const;
  Nat range() const { return static_cast<Nat>(rows_.size()); }
  /// Throws out_of_range outside the declared range.
  const PhiRow& row(Nat n) const;

 private:
  std::vector<PhiRow> rows_;
};

/// Phi_e with a step budget. The oracle is the join of finitely many
/// strings: position p of the join is entry p / k of string p % k.
struct Functional {
  enum class Kind { constant0, length_threshold, bit_probe };
  Kind kind = Kind::constant0;
  Nat param = 0;

  /// Output, or nothing when the computation does not halt within `steps`
  /// (or needs oracle positions the strings do not reach).
  std::optional<Nat> run(const std::vector<NatString>& oracle, Nat x, Nat steps) const;
};

/// `constant0`, `length_threshold:3`, `bit_probe:5`.
std::string format_functional(const Functional& f);
Functional parse_functional(std::string_view text);

/// Stagewise approximation to the halting set, restricted to the witnesses
/// handed out to U-strategies.
class HaltingSim {
 public:
  explicit HaltingSim(Nat witness_base = 1000) : next_(witness_base) {}
  Nat reserve() { return next_++; }
  void enumerate(Nat x, Nat stage) { entered_.emplace(x, stage); }
  bool contains(Nat x, Nat at_stage = kEndOfTime) const;
  std::optional<Nat> entered_at(Nat x) const;
  const std::map<Nat, Nat>& entries() const { return entered_; }
  /// `<x> <stage>` per line.
  std::string dump() const;

 private:
  Nat next_;
  std::map<Nat, Nat> entered_;
};

}  // namespace cubecode
