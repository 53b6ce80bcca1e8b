#include "cubecode/trace.hpp"

#include <charconv>
#include <sstream>

#include "cubecode/error.hpp"

namespace cubecode {

namespace {

Nat number(std::string_view text) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::parse_error, "bad number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

bool left_of(const Outcome& a, const Outcome& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.value > b.value;
}

std::string format_outcome(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::single: return "o";
    case Outcome::Kind::finite: return std::to_string(o.value);
    case Outcome::Kind::inf_index: return "i" + std::to_string(o.value);
    case Outcome::Kind::inf: return "inf";
  }
  return "?";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "o") return Outcome::single();
  if (text == "inf") return Outcome::inf();
  if (!text.empty() && text[0] == 'i') return Outcome::inf_index(number(text.substr(1)));
  return Outcome::finite(number(text));
}

std::string format_address(const Address& a) {
  if (a.empty()) return "/";
  std::string out;
  for (const auto& o : a) out += "/" + format_outcome(o);
  return out;
}

NodeId NodeStore::add(std::optional<NodeId> parent, Outcome from, Nat stage) {
  Node n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.parent = parent;
  n.from = from;
  n.first_visit = stage;
  if (parent) {
    n.depth = nodes_[*parent].depth + 1;
    nodes_[*parent].children.emplace(from, n.id);
  }
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

std::optional<NodeId> NodeStore::child(NodeId id, const Outcome& o) const {
  const auto& ch = nodes_[id].children;
  auto it = ch.find(o);
  if (it == ch.end()) return std::nullopt;
  return it->second;
}

NodeId NodeStore::ancestor_at(NodeId id, Nat depth) const {
  while (nodes_[id].depth > depth) id = *nodes_[id].parent;
  return id;
}

bool NodeStore::extends(NodeId a, NodeId b) const {
  if (nodes_[a].depth < nodes_[b].depth) return false;
  return ancestor_at(a, nodes_[b].depth) == b;
}

bool NodeStore::extends_outcome(NodeId a, NodeId b, const Outcome& o) const {
  if (nodes_[a].depth <= nodes_[b].depth) return false;
  auto c = ancestor_at(a, nodes_[b].depth + 1);
  return *nodes_[c].parent == b && nodes_[c].from == o;
}

std::optional<Outcome> NodeStore::outcome_toward(NodeId a, NodeId b) const {
  if (nodes_[a].depth <= nodes_[b].depth) return std::nullopt;
  auto c = ancestor_at(a, nodes_[b].depth + 1);
  if (*nodes_[c].parent != b) return std::nullopt;
  return nodes_[c].from;
}

std::vector<NodeId> NodeStore::path_to(NodeId id) const {
  std::vector<NodeId> out(nodes_[id].depth + 1);
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = id;
    if (nodes_[id].parent) id = *nodes_[id].parent;
  }
  return out;
}

Address NodeStore::address(NodeId id) const {
  Address out;
  for (auto n : path_to(id)) {
    if (nodes_[n].parent) out.push_back(nodes_[n].from);
  }
  return out;
}

void Trace::add(Nat stage, std::string tag, std::vector<std::string> fields) {
  events_.push_back({stage, std::move(tag), std::move(fields)});
}

std::string Trace::str() const {
  std::string out;
  for (const auto& h : header_) {
    out += h;
    out += '\n';
  }
  for (const auto& e : events_) {
    out += std::to_string(e.stage);
    out += ' ';
    out += e.tag;
    for (const auto& f : e.fields) {
      out += ' ';
      out += f;
    }
    out += '\n';
  }
  return out;
}

Trace Trace::parse(std::string_view text) {
  Trace t;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.header(std::string(line));
      continue;
    }
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < line.size()) {
      auto j = line.find(' ', i);
      if (j == std::string_view::npos) j = line.size();
      if (j > i) parts.emplace_back(line.substr(i, j - i));
      i = j + 1;
    }
    if (parts.size() < 2) throw Error(ErrorCode::parse_error, "short trace line");
    Event e{number(parts[0]), parts[1], {parts.begin() + 2, parts.end()}};
    t.events_.push_back(std::move(e));
  }
  return t;
}

TraceIndex::TraceIndex(const Trace& trace, Nat up_to_stage) {
  for (const auto& e : trace.events()) {
    if (e.stage > up_to_stage) break;
    if (e.tag == "S") {
      horizon_ = e.stage;
      if (stage_visits_.size() <= e.stage) stage_visits_.resize(e.stage + 1);
    } else if (e.tag == "T") {
      // T <id> <parent|-> <outcome|-> <type>
      if (e.fields.size() != 4) throw Error(ErrorCode::parse_error, "bad T event");
      std::optional<NodeId> parent;
      Outcome from;
      if (e.fields[1] != "-") {
        parent = number(e.fields[1]);
        from = parse_outcome(e.fields[2]);
      }
      auto id = nodes_.add(parent, from, e.stage);
      if (id != number(e.fields[0])) throw Error(ErrorCode::parse_error, "T ids out of order");
      nodes_.at(id).type = e.fields[3];
    } else if (e.tag == "V") {
      if (e.fields.size() != 2) throw Error(ErrorCode::parse_error, "bad V event");
      auto id = number(e.fields[0]);
      if (id >= nodes_.size()) throw Error(ErrorCode::parse_error, "V before T");
      nodes_.at(id).history.emplace_back(e.stage, parse_outcome(e.fields[1]));
      if (stage_visits_.size() <= e.stage) stage_visits_.resize(e.stage + 1);
      stage_visits_[e.stage].push_back(id);
    }
  }
}

const std::vector<NodeId>& TraceIndex::visits(Nat stage) const {
  static const std::vector<NodeId> none;
  return stage < stage_visits_.size() ? stage_visits_[stage] : none;
}

std::optional<NodeId> TraceIndex::node_for_field(std::string_view field) const {
  Nat id = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
  if (ec != std::errc{} || id >= nodes_.size()) return std::nullopt;
  return id;
}

}  // namespace cubecode
