#pragma once

// Outcomes, node addresses, the node store shared by the engine and the
// trace reader, and the line-oriented trace log.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubecode/cube_space.hpp"

namespace cubecode {

struct Outcome {
  // Declaration order is left-to-right order between kinds.
  enum class Kind : std::uint8_t { inf, inf_index, finite, single };
  Kind kind = Kind::single;
  Nat value = 0;

  static Outcome single() { return {Kind::single, 0}; }
  static Outcome finite(Nat n) { return {Kind::finite, n}; }
  static Outcome inf_index(Nat k) { return {Kind::inf_index, k}; }
  static Outcome inf() { return {Kind::inf, 0}; }

  bool infinite() const { return kind == Kind::inf || kind == Kind::inf_index; }

  friend bool operator==(const Outcome&, const Outcome&) = default;
  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

/// Strictly left of, in the tree order: inf < ... < i1 < i0 < ... < 1 < 0.
bool left_of(const Outcome& a, const Outcome& b);

/// `o`, `3`, `i3`, `inf`.
std::string format_outcome(const Outcome& o);
Outcome parse_outcome(std::string_view text);

using Address = std::vector<Outcome>;
/// `/` for the root, otherwise `/o/i0/3`.
std::string format_address(const Address& a);

using NodeId = std::uint32_t;

struct Node {
  NodeId id = 0;
  std::optional<NodeId> parent;
  Outcome from;
  Nat depth = 0;
  std::string type;
  Nat first_visit = 0;
  std::vector<std::pair<Nat, Outcome>> history;
  std::map<Outcome, NodeId> children;
};

class NodeStore {
 public:
  NodeId add(std::optional<NodeId> parent, Outcome from, Nat stage);
  std::optional<NodeId> child(NodeId id, const Outcome& o) const;

  const Node& operator[](NodeId id) const { return nodes_[id]; }
  Node& at(NodeId id) { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  NodeId ancestor_at(NodeId id, Nat depth) const;
  /// b is a (non-strict) prefix of a.
  bool extends(NodeId a, NodeId b) const;
  /// b^o is a prefix of a.
  bool extends_outcome(NodeId a, NodeId b, const Outcome& o) const;
  /// For b a proper prefix of a, the outcome o with b^o a prefix of a.
  std::optional<Outcome> outcome_toward(NodeId a, NodeId b) const;
  /// Root first, `id` last.
  std::vector<NodeId> path_to(NodeId id) const;
  Address address(NodeId id) const;

 private:
  std::vector<Node> nodes_;
};

struct Event {
  Nat stage = 0;
  std::string tag;
  std::vector<std::string> fields;
};

/// Event log. Line form: `<stage> <TAG> <field> ...`; header lines start
/// with `#` and are kept verbatim.
class Trace {
 public:
  void header(std::string line) { header_.push_back(std::move(line)); }
  void add(Nat stage, std::string tag, std::vector<std::string> fields = {});

  const std::vector<std::string>& headers() const { return header_; }
  const std::vector<Event>& events() const { return events_; }
  std::vector<Event>& mutable_events() { return events_; }

  std::string str() const;
  static Trace parse(std::string_view text);

 private:
  std::vector<std::string> header_;
  std::vector<Event> events_;
};

/// Tree and visit structure recovered from T / V events.
class TraceIndex {
 public:
  explicit TraceIndex(const Trace& trace, Nat up_to_stage = ~Nat{0});

  const NodeStore& nodes() const { return nodes_; }
  Nat horizon() const { return horizon_; }
  /// Nodes visited at `stage`, in visiting order.
  const std::vector<NodeId>& visits(Nat stage) const;
  std::optional<NodeId> node_for_field(std::string_view field) const;

 private:
  NodeStore nodes_;
  Nat horizon_ = 0;
  std::vector<std::vector<NodeId>> stage_visits_;
};

}  // namespace cubecode
