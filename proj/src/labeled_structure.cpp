#include "cubecode/labeled_structure.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <tuple>

#include "cubecode/error.hpp"

namespace cubecode {

namespace {

Nat parse_nat(std::string_view text, std::string_view what) {
  Nat value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::parse_error, "bad number '" + std::string(text) + "' in " +
                                            std::string(what));
  }
  return value;
}

std::vector<Nat> parse_list(std::string_view body, std::string_view what) {
  std::vector<Nat> out;
  if (body.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = body.find(',', pos);
    auto piece = body.substr(pos, comma == std::string_view::npos ? body.size() - pos
                                                                   : comma - pos);
    out.push_back(parse_nat(piece, what));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string sort_suffix(Sort s) {
  switch (s) {
    case Sort::none: return "";
    case Sort::zero: return "#0";
    case Sort::one: return "#1";
  }
  return "";
}

Sort parse_sort_suffix(std::string_view& text) {
  auto hash = text.rfind('#');
  if (hash == std::string_view::npos) return Sort::none;
  auto tail = text.substr(hash + 1);
  text = text.substr(0, hash);
  if (tail == "0") return Sort::zero;
  if (tail == "1") return Sort::one;
  throw Error(ErrorCode::parse_error, "bad sort '" + std::string(tail) + "'");
}

}  // namespace

std::string format_string(const NatString& s) {
  std::string out = "<";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  out += '>';
  return out;
}

NatString parse_string(std::string_view text) {
  if (text.size() < 2 || text.front() != '<' || text.back() != '>') {
    throw Error(ErrorCode::parse_error, "bad string '" + std::string(text) + "'");
  }
  return parse_list(text.substr(1, text.size() - 2), "string");
}

bool is_prefix(const NatString& prefix, const NatString& s) {
  return prefix.size() <= s.size() && std::equal(prefix.begin(), prefix.end(), s.begin());
}

NatString extend(NatString s, Nat symbol) {
  s.push_back(symbol);
  return s;
}

bool in_cube_range(const NatString& s, Nat bound) {
  if (s.size() >= bound) return false;
  return std::all_of(s.begin(), s.end(), [bound](Nat x) { return x < bound; });
}

const char* to_string(Variant v) { return v == Variant::cc ? "cc" : "dc"; }

Variant parse_variant(std::string_view text) {
  if (text == "cc") return Variant::cc;
  if (text == "dc") return Variant::dc;
  throw Error(ErrorCode::config_invalid, "unknown variant '" + std::string(text) + "'");
}

std::string format_key(const StringKey& key) {
  return format_string(key.string) + sort_suffix(key.sort);
}

StringKey parse_key(std::string_view text) {
  Sort sort = parse_sort_suffix(text);
  return {parse_string(text), sort};
}

std::string format_elem(const CubeElem& e) {
  return e.vertex.str() + "@" + format_string(e.string) + sort_suffix(e.sort);
}

std::string format_element(const ElementId& e) {
  if (auto* c = std::get_if<CubeElem>(&e)) return format_elem(*c);
  if (auto* u = std::get_if<UElem>(&e)) return "u" + std::to_string(u->index);
  return "c" + std::to_string(std::get<CarrierElem>(e).index);
}

CubeElem parse_elem(std::string_view text) {
  auto at = text.find('@');
  if (at == std::string_view::npos) {
    throw Error(ErrorCode::parse_error, "bad element '" + std::string(text) + "'");
  }
  auto set_text = text.substr(0, at);
  auto rest = text.substr(at + 1);
  if (set_text.size() < 2 || set_text.front() != '{' || set_text.back() != '}') {
    throw Error(ErrorCode::parse_error, "bad vertex '" + std::string(set_text) + "'");
  }
  CubeElem out;
  out.vertex = FinSet(parse_list(set_text.substr(1, set_text.size() - 2), "vertex"));
  out.sort = parse_sort_suffix(rest);
  out.string = parse_string(rest);
  return out;
}

bool holds_W(const NatString& sigma, Sort sort, const ElementId& e) {
  if (auto* c = std::get_if<CubeElem>(&e)) {
    if ((sort == Sort::none) != (c->sort == Sort::none)) {
      throw Error(ErrorCode::variant_mismatch,
                  "W query sort does not match element " + format_elem(*c));
    }
    return c->string == sigma && c->sort == sort;
  }
  if (std::holds_alternative<UElem>(e) && sort == Sort::none) {
    throw Error(ErrorCode::variant_mismatch, "u-element in single-sorted query");
  }
  return false;
}

bool holds_E(Nat color, const ElementId& a, const ElementId& b) {
  auto* x = std::get_if<CubeElem>(&a);
  auto* y = std::get_if<CubeElem>(&b);
  if (!x || !y) return false;
  if (x->string != y->string || x->sort != y->sort) return false;
  auto c = edge_color(x->vertex, y->vertex);
  return c && *c == color;
}

bool holds_P(const ElementId& a, const ElementId& b) {
  auto* y = std::get_if<CubeElem>(&b);
  if (!y) return false;
  if (auto* u = std::get_if<UElem>(&a)) {
    if (y->sort != Sort::zero || !y->string.empty()) return false;
    return (u->index + y->vertex.size()) % 2 == 0;
  }
  auto* x = std::get_if<CubeElem>(&a);
  if (!x) return false;
  if (x->sort != y->sort || y->string.size() != x->string.size() + 1) return false;
  if (!is_prefix(x->string, y->string)) return false;
  const Nat i = y->string.back();
  const bool odd = y->vertex.size() % 2 == 1;
  return x->vertex.contains(i) == odd;
}

// ---------------------------------------------------------------------------

LabelStore::KeyRecord& LabelStore::record(const StringKey& key) { return records_[key]; }

const LabelStore::KeyRecord* LabelStore::find(const StringKey& key) const {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

bool LabelStore::declare(Nat label, const CubeElem& elem, Nat stage) {
  if (stamp(label, elem)) return false;
  auto& rec = record(elem.key());
  rec.explicit_labels[elem.vertex][label] = stage;
  rec.version++;
  log_.push_back({label, elem, stage, next_seq_++});
  return true;
}

void LabelStore::grow(const StringKey& key, Nat stage) {
  auto top = top_label_before(key, kEndOfTime);
  const Nat m1 = top ? *top + 1 : 0;  // m + 1
  const CubeElem root = empty_at(key);
  for (Nat k = 0; k < m1 + 1; ++k) declare(k, root, stage);
  auto& rec = record(key);
  rec.grow_stages.push_back(stage);
  rec.version++;
  if (m1 < 2 || stage == 0) return;
  const Nat bound = m1 - 1;
  bool covered = false;
  for (auto idx : rec.bulk) {
    const auto& b = bulk_log_[idx];
    if (b.label_bound >= bound && b.support >= stage) covered = true;
  }
  if (covered) return;
  rec.bulk.push_back(bulk_log_.size());
  bulk_log_.push_back({key, bound, stage, stage, next_seq_++});
}

std::optional<Nat> LabelStore::stamp(Nat label, const CubeElem& elem) const {
  const auto* rec = find(elem.key());
  if (!rec) return std::nullopt;
  std::optional<Nat> best;
  if (auto v = rec->explicit_labels.find(elem.vertex); v != rec->explicit_labels.end()) {
    if (auto l = v->second.find(label); l != v->second.end()) best = l->second;
  }
  if (!elem.vertex.empty()) {
    for (auto idx : rec->bulk) {
      const auto& b = bulk_log_[idx];
      if (label < b.label_bound && elem.vertex.below(b.support)) {
        if (!best || b.stage < *best) best = b.stage;
      }
    }
  }
  return best;
}

bool LabelStore::holds(Nat label, const CubeElem& elem, Nat at_stage) const {
  auto st = stamp(label, elem);
  return st && *st <= at_stage;
}

std::vector<Nat> LabelStore::labels(const CubeElem& elem, Nat at_stage) const {
  const auto* rec = find(elem.key());
  if (!rec) return {};
  std::set<Nat> out;
  if (auto v = rec->explicit_labels.find(elem.vertex); v != rec->explicit_labels.end()) {
    for (auto [label, st] : v->second) {
      if (st <= at_stage) out.insert(label);
    }
  }
  if (!elem.vertex.empty()) {
    Nat bound = 0;
    for (auto idx : rec->bulk) {
      const auto& b = bulk_log_[idx];
      if (b.stage <= at_stage && elem.vertex.below(b.support)) {
        bound = std::max(bound, b.label_bound);
      }
    }
    for (Nat k = 0; k < bound; ++k) out.insert(k);
  }
  return {out.begin(), out.end()};
}

std::optional<Nat> LabelStore::top_label_before(const StringKey& key, Nat stage) const {
  const auto* rec = find(key);
  if (!rec) return std::nullopt;
  auto v = rec->explicit_labels.find(FinSet{});
  if (v == rec->explicit_labels.end()) return std::nullopt;
  std::optional<Nat> best;
  for (auto [label, st] : v->second) {
    if (st < stage || stage == kEndOfTime) best = label;  // map is ascending
  }
  return best;
}

Nat LabelStore::n_sigma(const StringKey& key, Nat stage) const {
  auto top = top_label_before(key, stage);
  if (!top) {
    throw Error(ErrorCode::undefined_label,
                "no label on " + format_key(key) + " before stage " + std::to_string(stage));
  }
  return *top;
}

std::size_t LabelStore::grow_count(const StringKey& key) const {
  const auto* rec = find(key);
  return rec ? rec->grow_stages.size() : 0;
}

std::optional<Nat> LabelStore::last_grow_stage(const StringKey& key) const {
  const auto* rec = find(key);
  if (!rec || rec->grow_stages.empty()) return std::nullopt;
  return rec->grow_stages.back();
}

std::uint64_t LabelStore::version(const StringKey& key) const {
  const auto* rec = find(key);
  return rec ? rec->version : 0;
}

std::set<StringKey> LabelStore::keys() const {
  std::set<StringKey> out;
  for (const auto& [key, rec] : records_) out.insert(key);
  return out;
}

std::string LabelStore::dump() const {
  std::ostringstream out;
  std::size_t i = 0, j = 0;
  while (i < log_.size() || j < bulk_log_.size()) {
    const bool take_explicit =
        j == bulk_log_.size() || (i < log_.size() && log_[i].seq < bulk_log_[j].seq);
    if (take_explicit) {
      const auto& d = log_[i++];
      out << d.stage << ' ' << d.label << ' ' << format_elem(d.elem) << '\n';
    } else {
      const auto& b = bulk_log_[j++];
      out << b.stage << ' ' << b.label_bound << " *" << b.support << '@'
          << format_string(b.key.string) << sort_suffix(b.key.sort) << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------

ElementId LongForm::f(const ElementId& e) const {
  if (auto* c = std::get_if<CarrierElem>(&e)) {
    if (c->index < carriers.size()) return carriers[c->index].target;
  }
  return e;
}

bool LongForm::V(Nat label, const ElementId& e) const {
  auto* c = std::get_if<CarrierElem>(&e);
  return c && c->index < carriers.size() && carriers[c->index].label == label;
}

std::set<std::pair<Nat, CubeElem>> LongForm::reduced_facts() const {
  std::set<std::pair<Nat, CubeElem>> out;
  for (const auto& c : carriers) out.emplace(c.label, c.target);
  return out;
}

LongForm export_long_form(const StructureSnapshot& snapshot, Nat support) {
  LongForm out{snapshot.variant, support, {}};
  const auto& store = *snapshot.store;
  std::set<std::pair<Nat, CubeElem>> seen;
  auto allocate = [&](Nat label, const CubeElem& target, Nat stage) {
    if (!seen.emplace(label, target).second) return;
    out.carriers.push_back({out.carriers.size(), label, target, stage});
  };
  const auto& log = store.declarations();
  const auto& bulk = store.bulk_declarations();
  std::size_t i = 0, j = 0;
  while (i < log.size() || j < bulk.size()) {
    const bool take_explicit =
        j == bulk.size() || (i < log.size() && log[i].seq < bulk[j].seq);
    if (take_explicit) {
      const auto& d = log[i++];
      if (d.stage <= snapshot.stage && d.elem.vertex.below(support)) {
        allocate(d.label, d.elem, d.stage);
      }
      continue;
    }
    const auto& b = bulk[j++];
    if (b.stage > snapshot.stage) continue;
    const Nat width = std::min(support, b.support);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << width); ++mask) {
      CubeElem target{FinSet::from_mask(mask), b.key.string, b.key.sort};
      for (Nat k = 0; k < b.label_bound; ++k) allocate(k, target, b.stage);
    }
  }
  return out;
}

std::set<std::pair<Nat, CubeElem>> reduced_facts(const StructureSnapshot& snapshot,
                                                 Nat support) {
  std::set<std::pair<Nat, CubeElem>> out;
  for (const auto& key : snapshot.store->keys()) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << support); ++mask) {
      CubeElem e{FinSet::from_mask(mask), key.string, key.sort};
      for (Nat label : snapshot.labels(e)) out.emplace(label, e);
    }
  }
  return out;
}

std::map<std::uint64_t, std::uint64_t> lift_isomorphism(
    const std::function<CubeElem(const CubeElem&)>& g, const LongForm& source,
    const LongForm& target) {
  std::map<std::pair<Nat, CubeElem>, std::uint64_t> index;
  for (const auto& c : target.carriers) index.emplace(std::pair{c.label, c.target}, c.index);
  std::map<std::uint64_t, std::uint64_t> out;
  for (const auto& c : source.carriers) {
    auto image = g(c.target);
    auto it = index.find({c.label, image});
    if (it == index.end()) {
      throw Error(ErrorCode::unmatched_carrier,
                  "no carrier for S" + std::to_string(c.label) + "(" + format_elem(image) + ")");
    }
    out.emplace(c.index, it->second);
  }
  return out;
}

}  // namespace cubecode
