#pragma once

// The coding structure: one cube per tree address (and per sort in the
// two-sorted variant), the decidable relations W, E, P on it, and the
// append-only store of c.e. labels S_n together with the carrier
// encoding U / C / f / V_n used by the long-form presentation.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cubecode/cube_space.hpp"

namespace cubecode {

using NatString = std::vector<Nat>;

/// `<>` or `<1,5,2>`.
std::string format_string(const NatString& s);
NatString parse_string(std::string_view text);

bool is_prefix(const NatString& prefix, const NatString& s);
NatString extend(NatString s, Nat symbol);

/// True iff s lies in bound^{<bound}: shorter than `bound` with every
/// symbol below `bound`.
bool in_cube_range(const NatString& s, Nat bound);

enum class Variant { cc, dc };

const char* to_string(Variant v);
Variant parse_variant(std::string_view text);

/// Sort of an element: `none` in the single-sorted structure; the
/// two-sorted structure uses `zero` (the Q side) and `one` (the R side).
enum class Sort : std::int8_t { none = -1, zero = 0, one = 1 };

/// A tree address together with its sort: the unit that is chosen and grown.
struct StringKey {
  NatString string;
  Sort sort = Sort::none;

  friend bool operator==(const StringKey&, const StringKey&) = default;
  friend auto operator<=>(const StringKey&, const StringKey&) = default;
};

/// `<1,2>` or `<1,2>#0`.
std::string format_key(const StringKey& key);
StringKey parse_key(std::string_view text);

struct CubeElem {
  FinSet vertex;
  NatString string;
  Sort sort = Sort::none;

  StringKey key() const { return {string, sort}; }

  friend bool operator==(const CubeElem&, const CubeElem&) = default;
  friend auto operator<=>(const CubeElem&, const CubeElem&) = default;
};

struct UElem {
  Nat index = 0;
  friend bool operator==(const UElem&, const UElem&) = default;
  friend auto operator<=>(const UElem&, const UElem&) = default;
};

struct CarrierElem {
  std::uint64_t index = 0;
  friend bool operator==(const CarrierElem&, const CarrierElem&) = default;
  friend auto operator<=>(const CarrierElem&, const CarrierElem&) = default;
};

using ElementId = std::variant<CubeElem, UElem, CarrierElem>;

/// Canonical element syntax `F@sigma[#sort]`, `u0`/`u1`, `c<index>`.
std::string format_elem(const CubeElem& e);
std::string format_element(const ElementId& e);
CubeElem parse_elem(std::string_view text);

inline CubeElem empty_at(const StringKey& key) { return {FinSet{}, key.string, key.sort}; }

/// W_sigma (single-sorted, `sort == none`), W^Q_sigma (`zero`) or
/// W^R_sigma (`one`). Throws variant_mismatch when the query sort and the
/// element sort belong to different variants.
bool holds_W(const NatString& sigma, Sort sort, const ElementId& e);
bool holds_E(Nat color, const ElementId& a, const ElementId& b);
bool holds_P(const ElementId& a, const ElementId& b);

/// One explicit label declaration, S_label(elem) made at `stage`.
struct Declaration {
  Nat label = 0;
  CubeElem elem;
  Nat stage = 0;
  std::uint64_t seq = 0;
};

/// The nonempty-vertex half of a grow: S_k((F, key)) for every k < label_bound
/// and every nonempty F inside {0,...,support-1}.
struct BulkDeclaration {
  StringKey key;
  Nat label_bound = 0;
  Nat support = 0;
  Nat stage = 0;
  std::uint64_t seq = 0;
};

inline constexpr Nat kEndOfTime = std::numeric_limits<Nat>::max();

/// Append-only label log. Stamps record the declaring stage; a query "at
/// stage s" sees declarations stamped <= s, and "before stage s" sees
/// stamps < s.
class LabelStore {
 public:
  /// Records S_label(elem). Returns false and changes nothing when the same
  /// declaration was already made.
  bool declare(Nat label, const CubeElem& elem, Nat stage);

  /// Grows the key at `stage`: with m the largest label on the empty vertex
  /// (-1 if none), declares S_k on the empty vertex for k < m + 2 and on
  /// every nonempty F inside {0,...,stage-1} for k < m.
  void grow(const StringKey& key, Nat stage);

  bool holds(Nat label, const CubeElem& elem, Nat at_stage = kEndOfTime) const;
  std::optional<Nat> stamp(Nat label, const CubeElem& elem) const;
  /// Sorted labels of `elem` visible at `at_stage`.
  std::vector<Nat> labels(const CubeElem& elem, Nat at_stage = kEndOfTime) const;
  /// Largest label on the empty vertex of `key` stamped before `stage`.
  std::optional<Nat> top_label_before(const StringKey& key, Nat stage) const;
  /// n_sigma(s); throws undefined_label when nothing is declared yet.
  Nat n_sigma(const StringKey& key, Nat stage) const;

  std::size_t grow_count(const StringKey& key) const;
  std::optional<Nat> last_grow_stage(const StringKey& key) const;

  const std::vector<Declaration>& declarations() const { return log_; }
  const std::vector<BulkDeclaration>& bulk_declarations() const { return bulk_log_; }
  /// Bumped whenever anything about `key` changes; lets observers skip
  /// untouched keys.
  std::uint64_t version(const StringKey& key) const;
  std::set<StringKey> keys() const;

  /// One line per declaration, ordered by declaration sequence:
  /// `<stage> <label> <elem>` or, for the bulk half of a grow,
  /// `<stage> <label_bound> *<support>@sigma[#sort]`.
  std::string dump() const;

 private:
  struct KeyRecord {
    std::map<FinSet, std::map<Nat, Nat>> explicit_labels;  // vertex -> label -> stamp
    std::vector<std::size_t> bulk;                         // indices into bulk_log_
    std::vector<Nat> grow_stages;
    std::uint64_t version = 0;
  };

  KeyRecord& record(const StringKey& key);
  const KeyRecord* find(const StringKey& key) const;

  std::vector<Declaration> log_;
  std::vector<BulkDeclaration> bulk_log_;
  std::map<StringKey, KeyRecord> records_;
  std::uint64_t next_seq_ = 0;
};

/// An immutable view of a store as of one stage.
struct StructureSnapshot {
  Variant variant = Variant::cc;
  std::shared_ptr<const LabelStore> store;
  Nat stage = 0;

  bool holds_S(Nat label, const CubeElem& e) const { return store->holds(label, e, stage); }
  std::vector<Nat> labels(const CubeElem& e) const { return store->labels(e, stage); }
};

/// Long-form presentation restricted to cube elements with vertex inside
/// {0,...,support-1}: each label fact S_n(y) gets its own carrier x with
/// U(x), V_n(x) and f(x) = y, allocated in declaration order.
struct Carrier {
  std::uint64_t index = 0;
  Nat label = 0;
  CubeElem target;
  Nat stage = 0;
};

struct LongForm {
  Variant variant = Variant::cc;
  Nat support = 0;
  std::vector<Carrier> carriers;

  /// f on the whole universe: identity off C.
  ElementId f(const ElementId& e) const;
  bool U(const ElementId& e) const { return std::holds_alternative<CarrierElem>(e); }
  bool V(Nat label, const ElementId& e) const;
  /// Forgets carriers again: the set of (label, element) facts.
  std::set<std::pair<Nat, CubeElem>> reduced_facts() const;
};

LongForm export_long_form(const StructureSnapshot& snapshot, Nat support);

/// Reduced label facts of the snapshot restricted to `support`.
std::set<std::pair<Nat, CubeElem>> reduced_facts(const StructureSnapshot& snapshot,
                                                 Nat support);

/// Extends a reduced-form map to carriers: a source carrier for S_n(y) goes to
/// the target carrier for S_n(g(y)). Throws unmatched_carrier when the target
/// lacks that declaration.
std::map<std::uint64_t, std::uint64_t> lift_isomorphism(
    const std::function<CubeElem(const CubeElem&)>& g, const LongForm& source,
    const LongForm& target);

}  // namespace cubecode
