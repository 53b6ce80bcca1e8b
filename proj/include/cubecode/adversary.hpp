#pragma once

// Opponent structures M_i: stagewise enumerations of positive atomic facts
// over the universe of natural numbers, plus generators that mirror the
// structure being built (optionally permuted, delayed or damaged).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cubecode/labeled_structure.hpp"
#include "cubecode/window.hpp"

namespace cubecode {

enum class Rel : std::uint8_t { W, E, P, S };

/// W: key(x). E: E_index(x, y). P: P(x, y). S: S_index(x).
struct Fact {
  Rel rel = Rel::W;
  StringKey key;
  Nat index = 0;
  Nat x = 0;
  Nat y = 0;
  Nat step = 0;
};

/// `<step> W <x> <key>`, `<step> E<i> <x> <y>`, `<step> P <x> <y>`, `<step> S<n> <x>`.
std::string format_fact(const Fact& f);
Fact parse_fact(std::string_view line);

/// One conjunct of a predicate in the single unknown x. `other` is the fixed
/// second argument of E / P; `x_first` says which side x is on.
struct Atom {
  Rel rel = Rel::W;
  StringKey key;
  Nat index = 0;
  Nat other = 0;
  bool x_first = true;
};

class FactStream {
 public:
  /// Adds a fact; an already present fact keeps its earlier step.
  void add(const Fact& f);

  /// True iff the fact (step ignored) was enumerated with step <= budget.
  bool holds_within(const Fact& f, Nat budget) const;
  /// Step of the first fact mentioning x, if any within the budget.
  std::optional<Nat> age(Nat x, Nat budget = kEndOfTime) const;

  /// The element of least age satisfying every atom within the budget;
  /// ties go to the smaller number.
  std::optional<Nat> oldest_satisfying(const std::vector<Atom>& atoms, Nat budget) const;

  std::vector<Nat> labels(Nat x, Nat budget) const;
  /// Some y with E_color(x, y) within budget; the earliest such.
  std::optional<Nat> e_neighbor(Nat color, Nat x, Nat budget) const;
  std::vector<Nat> elements(Nat budget = kEndOfTime) const;
  std::optional<StringKey> w_key(Nat x, Nat budget) const;

  std::size_t size() const { return facts_.size(); }
  /// Facts sorted by (step, insertion order).
  std::vector<Fact> facts() const;
  std::string dump() const;
  static FactStream parse(std::string_view text);

 private:
  struct Key {
    Rel rel;
    Nat index, x, y;
    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.rel, a.index, a.x, a.y) < std::tie(b.rel, b.index, b.x, b.y);
    }
  };

  std::optional<Nat> atom_step(const Atom& a, Nat x) const;

  std::vector<Fact> facts_;
  std::map<Key, std::size_t> relational_;          // E, P, S
  std::map<std::pair<StringKey, Nat>, std::size_t> w_index_;
  std::map<StringKey, std::vector<Nat>> w_members_;
  std::map<Nat, StringKey> w_of_;
  std::map<std::pair<Nat, Nat>, std::vector<Nat>> e_out_;  // (color, x) -> ys
  std::map<Nat, std::vector<Nat>> s_of_;                   // x -> labels
  std::map<Nat, Nat> first_step_;
};

// --- permutations -----------------------------------------------------------

/// A computable bijection of the naturals: the identity, or a seeded
/// Fisher-Yates shuffle inside consecutive blocks of a fixed size.
class Permutation {
 public:
  static Permutation identity() { return {}; }
  static Permutation block_shuffle(std::uint64_t seed, Nat block);

  Nat apply(Nat x) const;
  Nat invert(Nat y) const;
  std::string describe() const;

 private:
  const std::vector<Nat>& block(Nat index) const;

  bool shuffle_ = false;
  std::uint64_t seed_ = 0;
  Nat block_ = 1;
  mutable std::map<Nat, std::vector<Nat>> forward_, backward_;
};

// --- defects ----------------------------------------------------------------

struct Defect {
  enum class Kind { omit_label, break_p, freeze_after };
  Kind kind = Kind::omit_label;
  Nat label = 0;     // omit_label
  StringKey key;     // omit_label, break_p
  Nat child = 0;     // break_p
  Nat step = 0;      // freeze_after
};

std::string describe(const Defect& d);

// --- adversaries ------------------------------------------------------------

class Adversary {
 public:
  virtual ~Adversary() = default;

  /// Lets mirroring adversaries catch up with the structure as of `stage`.
  virtual void sync(const LabelStore&, const StringWindow&, Variant, Nat) {}

  const FactStream& stream() const { return stream_; }
  const std::string& name() const { return name_; }

  /// The ground-truth isomorphism h onto the built structure and its inverse,
  /// when the adversary knows it.
  virtual std::optional<ElementId> ground(Nat) const { return std::nullopt; }
  virtual std::optional<Nat> id_of(const ElementId&) const { return std::nullopt; }
  virtual Nat delay() const { return 0; }
  virtual bool faithful() const { return false; }

 protected:
  explicit Adversary(std::string name) : name_(std::move(name)) {}
  FactStream stream_;

 private:
  std::string name_;
};

/// A static stream, e.g. read from a file.
class StreamAdversary : public Adversary {
 public:
  StreamAdversary(std::string name, FactStream stream);
};

struct MirrorSpec {
  Permutation permutation;
  Nat delay = 0;
  std::vector<Defect> defects;
};

/// Copies the structure under construction: every window key that has
/// entered the current cube range, vertices inside the support bound, and
/// every label declared so far. Element numbers are canonical positions
/// pushed through the permutation.
class MirrorAdversary : public Adversary {
 public:
  MirrorAdversary(std::string name, MirrorSpec spec, Nat support);

  void sync(const LabelStore& store, const StringWindow& window, Variant variant,
            Nat stage) override;

  std::optional<ElementId> ground(Nat x) const override;
  std::optional<Nat> id_of(const ElementId& e) const override;
  Nat delay() const override { return spec_.delay; }
  bool faithful() const override { return spec_.defects.empty(); }
  const MirrorSpec& spec() const { return spec_; }

 private:
  struct KeyState {
    Nat ordinal = 0;
    Nat entered = 0;
  };

  Nat canonical(const ElementId& e) const;
  std::optional<ElementId> decode(Nat canonical) const;
  void emit(Fact f);
  bool omitted(Nat label, const StringKey& key) const;
  void emit_label(const LabelStore& store, Nat label, const CubeElem& e);
  void enter_key(const StringKey& key, Nat stage, Variant variant);
  Nat elem_step(const StringKey& key, const FinSet& vertex) const;

  MirrorSpec spec_;
  Nat support_;
  Nat offset_ = 0;  // 2 in the two-sorted variant: u0, u1 come first
  std::map<StringKey, KeyState> keys_;
  std::vector<StringKey> by_ordinal_;
  std::size_t decl_cursor_ = 0;
  std::size_t bulk_cursor_ = 0;
  std::map<StringKey, std::pair<Nat, Nat>> bulk_seen_;  // label bound, support
};

std::unique_ptr<MirrorAdversary> make_faithful_copy(std::string name, Permutation perm,
                                                    Nat delay, Nat support);
std::unique_ptr<MirrorAdversary> make_defective_copy(std::string name, Permutation perm,
                                                     Nat delay, std::vector<Defect> defects,
                                                     Nat support);

/// The decidable part of the built structure, and its declared labels,
/// materialized over explicit keys. Used for self-maps and as a reference
/// stream in checks. Element numbering follows `index`.
struct Materialized {
  FactStream stream;
  std::map<CubeElem, Nat> index;
  std::map<Nat, ElementId> element;
};

Materialized materialize(const StructureSnapshot& snapshot, const std::vector<StringKey>& keys,
                         Nat support);

}  // namespace cubecode
