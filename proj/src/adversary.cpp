#include "cubecode/adversary.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "cubecode/error.hpp"

namespace cubecode {

namespace {

Nat to_nat(std::string_view text) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::parse_error, "bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string format_fact(const Fact& f) {
  std::ostringstream out;
  out << f.step << ' ';
  switch (f.rel) {
    case Rel::W: out << "W " << f.x << ' ' << format_key(f.key); break;
    case Rel::E: out << 'E' << f.index << ' ' << f.x << ' ' << f.y; break;
    case Rel::P: out << "P " << f.x << ' ' << f.y; break;
    case Rel::S: out << 'S' << f.index << ' ' << f.x; break;
  }
  return out.str();
}

Fact parse_fact(std::string_view line) {
  auto parts = split_ws(line);
  if (parts.size() < 3) throw Error(ErrorCode::parse_error, "short fact line");
  Fact f;
  f.step = to_nat(parts[0]);
  auto tag = parts[1];
  if (tag == "W" && parts.size() == 4) {
    f.rel = Rel::W;
    f.x = to_nat(parts[2]);
    f.key = parse_key(parts[3]);
  } else if (tag == "P" && parts.size() == 4) {
    f.rel = Rel::P;
    f.x = to_nat(parts[2]);
    f.y = to_nat(parts[3]);
  } else if (tag.size() > 1 && tag[0] == 'E' && parts.size() == 4) {
    f.rel = Rel::E;
    f.index = to_nat(tag.substr(1));
    f.x = to_nat(parts[2]);
    f.y = to_nat(parts[3]);
  } else if (tag.size() > 1 && tag[0] == 'S' && parts.size() == 3) {
    f.rel = Rel::S;
    f.index = to_nat(tag.substr(1));
    f.x = to_nat(parts[2]);
  } else {
    throw Error(ErrorCode::parse_error, "bad fact line '" + std::string(line) + "'");
  }
  return f;
}

// ---------------------------------------------------------------------------

void FactStream::add(const Fact& f) {
  auto touch = [&](Nat x) {
    auto [it, fresh] = first_step_.emplace(x, f.step);
    if (!fresh && f.step < it->second) it->second = f.step;
  };
  std::size_t* slot = nullptr;
  if (f.rel == Rel::W) {
    auto [it, fresh] = w_index_.emplace(std::pair{f.key, f.x}, facts_.size());
    if (!fresh) {
      slot = &it->second;
    } else {
      w_members_[f.key].push_back(f.x);
      w_of_.emplace(f.x, f.key);
    }
  } else {
    auto [it, fresh] = relational_.emplace(Key{f.rel, f.index, f.x, f.y}, facts_.size());
    if (!fresh) {
      slot = &it->second;
    } else if (f.rel == Rel::E) {
      e_out_[{f.index, f.x}].push_back(f.y);
    } else if (f.rel == Rel::S) {
      s_of_[f.x].push_back(f.index);
    }
  }
  if (slot) {
    if (f.step < facts_[*slot].step) {
      facts_[*slot].step = f.step;
      touch(f.x);
      if (f.rel == Rel::E || f.rel == Rel::P) touch(f.y);
    }
    return;
  }
  facts_.push_back(f);
  touch(f.x);
  if (f.rel == Rel::E || f.rel == Rel::P) touch(f.y);
}

bool FactStream::holds_within(const Fact& f, Nat budget) const {
  if (f.rel == Rel::W) {
    auto it = w_index_.find({f.key, f.x});
    return it != w_index_.end() && facts_[it->second].step <= budget;
  }
  auto it = relational_.find(Key{f.rel, f.index, f.x, f.y});
  return it != relational_.end() && facts_[it->second].step <= budget;
}

std::optional<Nat> FactStream::age(Nat x, Nat budget) const {
  auto it = first_step_.find(x);
  if (it == first_step_.end() || it->second > budget) return std::nullopt;
  return it->second;
}

std::optional<Nat> FactStream::atom_step(const Atom& a, Nat x) const {
  if (a.rel == Rel::W) {
    auto it = w_index_.find({a.key, x});
    if (it == w_index_.end()) return std::nullopt;
    return facts_[it->second].step;
  }
  Key k{a.rel, a.index, x, 0};
  if (a.rel == Rel::E || a.rel == Rel::P) {
    k.x = a.x_first ? x : a.other;
    k.y = a.x_first ? a.other : x;
  }
  auto it = relational_.find(k);
  if (it == relational_.end()) return std::nullopt;
  return facts_[it->second].step;
}

std::optional<Nat> FactStream::oldest_satisfying(const std::vector<Atom>& atoms,
                                                 Nat budget) const {
  std::vector<Nat> pool;
  const std::vector<Nat>* candidates = nullptr;
  for (const auto& a : atoms) {
    if (a.rel == Rel::W) {
      auto it = w_members_.find(a.key);
      if (it == w_members_.end()) return std::nullopt;
      candidates = &it->second;
      break;
    }
  }
  if (!candidates) {
    pool = elements(budget);
    candidates = &pool;
  }
  std::optional<std::pair<Nat, Nat>> best;  // (age, x)
  for (Nat x : *candidates) {
    bool ok = true;
    for (const auto& a : atoms) {
      auto st = atom_step(a, x);
      if (!st || *st > budget) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::pair<Nat, Nat> rank{*age(x), x};
    if (!best || rank < *best) best = rank;
  }
  if (!best) return std::nullopt;
  return best->second;
}

std::vector<Nat> FactStream::labels(Nat x, Nat budget) const {
  std::vector<Nat> out;
  auto it = s_of_.find(x);
  if (it == s_of_.end()) return out;
  for (Nat n : it->second) {
    if (holds_within(Fact{Rel::S, {}, n, x, 0, 0}, budget)) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Nat> FactStream::e_neighbor(Nat color, Nat x, Nat budget) const {
  auto it = e_out_.find({color, x});
  if (it == e_out_.end()) return std::nullopt;
  std::optional<std::pair<Nat, Nat>> best;
  for (Nat y : it->second) {
    auto st = facts_[relational_.at(Key{Rel::E, color, x, y})].step;
    if (st > budget) continue;
    if (!best || std::pair{st, y} < *best) best = std::pair{st, y};
  }
  if (!best) return std::nullopt;
  return best->second;
}

std::vector<Nat> FactStream::elements(Nat budget) const {
  std::vector<Nat> out;
  for (auto [x, st] : first_step_) {
    if (st <= budget) out.push_back(x);
  }
  return out;
}

std::optional<StringKey> FactStream::w_key(Nat x, Nat budget) const {
  auto it = w_of_.find(x);
  if (it == w_of_.end()) return std::nullopt;
  if (!holds_within(Fact{Rel::W, it->second, 0, x, 0, 0}, budget)) return std::nullopt;
  return it->second;
}

std::vector<Fact> FactStream::facts() const {
  std::vector<Fact> out = facts_;
  std::stable_sort(out.begin(), out.end(),
                   [](const Fact& a, const Fact& b) { return a.step < b.step; });
  return out;
}

std::string FactStream::dump() const {
  std::string out;
  for (const auto& f : facts()) {
    out += format_fact(f);
    out += '\n';
  }
  return out;
}

FactStream FactStream::parse(std::string_view text) {
  FactStream out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty() || line[0] == '#') continue;
    out.add(parse_fact(line));
  }
  return out;
}

// ---------------------------------------------------------------------------

Permutation Permutation::block_shuffle(std::uint64_t seed, Nat block) {
  if (block == 0) throw Error(ErrorCode::config_invalid, "block size must be positive");
  Permutation p;
  p.shuffle_ = true;
  p.seed_ = seed;
  p.block_ = block;
  return p;
}

const std::vector<Nat>& Permutation::block(Nat index) const {
  auto it = forward_.find(index);
  if (it != forward_.end()) return it->second;
  std::vector<Nat> v(block_);
  std::iota(v.begin(), v.end(), 0U);
  std::mt19937_64 rng(seed_ ^ (std::uint64_t{index} * 0x9E3779B97F4A7C15ULL));
  for (Nat i = block_ - 1; i > 0; --i) {
    auto j = static_cast<Nat>(rng() % (i + 1));
    std::swap(v[i], v[j]);
  }
  std::vector<Nat> inv(block_);
  for (Nat i = 0; i < block_; ++i) inv[v[i]] = i;
  backward_.emplace(index, std::move(inv));
  return forward_.emplace(index, std::move(v)).first->second;
}

Nat Permutation::apply(Nat x) const {
  if (!shuffle_) return x;
  const Nat b = x / block_;
  return b * block_ + block(b)[x % block_];
}

Nat Permutation::invert(Nat y) const {
  if (!shuffle_) return y;
  const Nat b = y / block_;
  block(b);
  return b * block_ + backward_.at(b)[y % block_];
}

std::string Permutation::describe() const {
  if (!shuffle_) return "identity";
  return "block_shuffle(" + std::to_string(seed_) + "," + std::to_string(block_) + ")";
}

std::string describe(const Defect& d) {
  switch (d.kind) {
    case Defect::Kind::omit_label:
      return "omit_label(" + std::to_string(d.label) + "," + format_key(d.key) + ")";
    case Defect::Kind::break_p:
      return "break_p(" + format_key(d.key) + "," + std::to_string(d.child) + ")";
    case Defect::Kind::freeze_after:
      return "freeze_after(" + std::to_string(d.step) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------

StreamAdversary::StreamAdversary(std::string name, FactStream stream)
    : Adversary(std::move(name)) {
  stream_ = std::move(stream);
}

MirrorAdversary::MirrorAdversary(std::string name, MirrorSpec spec, Nat support)
    : Adversary(std::move(name)), spec_(std::move(spec)), support_(support) {
  if (support_ > 16) throw Error(ErrorCode::config_invalid, "support above 16");
}

Nat MirrorAdversary::canonical(const ElementId& e) const {
  if (auto* u = std::get_if<UElem>(&e)) return u->index;
  const auto& c = std::get<CubeElem>(e);
  const auto& st = keys_.at(c.key());
  return offset_ + (st.ordinal << support_) + static_cast<Nat>(c.vertex.mask());
}

std::optional<ElementId> MirrorAdversary::decode(Nat canon) const {
  if (canon < offset_) return ElementId{UElem{canon}};
  const Nat rel = canon - offset_;
  const Nat ordinal = rel >> support_;
  if (ordinal >= by_ordinal_.size()) return std::nullopt;
  const auto& key = by_ordinal_[ordinal];
  return ElementId{CubeElem{FinSet::from_mask(rel & ((1U << support_) - 1)), key.string, key.sort}};
}

std::optional<ElementId> MirrorAdversary::ground(Nat x) const {
  return decode(spec_.permutation.invert(x));
}

std::optional<Nat> MirrorAdversary::id_of(const ElementId& e) const {
  if (auto* c = std::get_if<CubeElem>(&e)) {
    if (!keys_.count(c->key()) || !c->vertex.below(support_)) return std::nullopt;
  } else if (auto* u = std::get_if<UElem>(&e)) {
    if (u->index >= offset_) return std::nullopt;
  } else {
    return std::nullopt;
  }
  return spec_.permutation.apply(canonical(e));
}

Nat MirrorAdversary::elem_step(const StringKey& key, const FinSet& vertex) const {
  return keys_.at(key).entered + spec_.delay + (vertex.empty() ? 0 : 1);
}

void MirrorAdversary::emit(Fact f) {
  for (const auto& d : spec_.defects) {
    if (d.kind == Defect::Kind::freeze_after && f.step > d.step) return;
  }
  f.x = spec_.permutation.apply(f.x);
  if (f.rel == Rel::E || f.rel == Rel::P) f.y = spec_.permutation.apply(f.y);
  stream_.add(f);
}

void MirrorAdversary::enter_key(const StringKey& key, Nat stage, Variant variant) {
  auto& st = keys_[key];
  st.ordinal = static_cast<Nat>(by_ordinal_.size());
  st.entered = stage;
  by_ordinal_.push_back(key);
  const Nat count = 1U << support_;
  auto elem = [&](Nat mask) { return CubeElem{FinSet::from_mask(mask), key.string, key.sort}; };

  for (Nat m = 0; m < count; ++m) {
    auto e = elem(m);
    emit({Rel::W, key, 0, canonical(e), 0, elem_step(key, e.vertex)});
  }
  for (Nat m = 0; m < count; ++m) {
    for (Nat i = 0; i < support_; ++i) {
      auto a = elem(m), b = elem(m ^ (1U << i));
      emit({Rel::E, {}, i, canonical(a), canonical(b),
            std::max(elem_step(key, a.vertex), elem_step(key, b.vertex))});
    }
  }
  if (!key.string.empty()) {
    StringKey parent{NatString(key.string.begin(), key.string.end() - 1), key.sort};
    const Nat j = key.string.back();
    bool broken = false;
    for (const auto& d : spec_.defects) {
      if (d.kind == Defect::Kind::break_p && d.key == parent && d.child == j) broken = true;
    }
    if (keys_.count(parent) && !broken) {
      for (Nat pm = 0; pm < count; ++pm) {
        CubeElem p{FinSet::from_mask(pm), parent.string, parent.sort};
        for (Nat cm = 0; cm < count; ++cm) {
          auto c = elem(cm);
          if (!holds_P(p, c)) continue;
          emit({Rel::P, {}, 0, canonical(p), canonical(c),
                std::max(elem_step(parent, p.vertex), elem_step(key, c.vertex))});
        }
      }
    }
  }
  if (variant == Variant::dc && key.string.empty() && key.sort == Sort::zero) {
    for (Nat k = 0; k < 2; ++k) {
      for (Nat m = 0; m < count; ++m) {
        auto c = elem(m);
        if (!holds_P(UElem{k}, c)) continue;
        emit({Rel::P, {}, 0, k, canonical(c), elem_step(key, c.vertex)});
      }
    }
  }
}

bool MirrorAdversary::omitted(Nat label, const StringKey& key) const {
  for (const auto& d : spec_.defects) {
    if (d.kind == Defect::Kind::omit_label && d.label == label && d.key == key) return true;
  }
  return false;
}

void MirrorAdversary::emit_label(const LabelStore& store, Nat label, const CubeElem& e) {
  if (omitted(label, e.key())) return;
  const Nat step = std::max(*store.stamp(label, e) + spec_.delay, elem_step(e.key(), e.vertex));
  emit({Rel::S, {}, label, canonical(e), 0, step});
}

void MirrorAdversary::sync(const LabelStore& store, const StringWindow& window,
                           Variant variant, Nat stage) {
  offset_ = variant == Variant::dc ? 2 : 0;
  const Nat count = 1U << support_;
  std::vector<StringKey> entering;
  for (const auto& s : window.range(stage)) {
    if (variant == Variant::cc) {
      StringKey key{s, Sort::none};
      if (!keys_.count(key)) entering.push_back(key);
    } else {
      for (Sort sort : {Sort::zero, Sort::one}) {
        StringKey key{s, sort};
        if (!keys_.count(key)) entering.push_back(key);
      }
    }
  }
  for (const auto& key : entering) {
    enter_key(key, stage, variant);
    for (Nat m = 0; m < count; ++m) {
      CubeElem e{FinSet::from_mask(m), key.string, key.sort};
      for (Nat label : store.labels(e, stage)) emit_label(store, label, e);
    }
  }

  // only what was declared since the last sync; keys that just entered were
  // covered in full above
  const std::set<StringKey> fresh(entering.begin(), entering.end());
  const auto& log = store.declarations();
  for (; decl_cursor_ < log.size(); ++decl_cursor_) {
    const auto& d = log[decl_cursor_];
    if (d.stage > stage) break;
    const StringKey key = d.elem.key();
    if (!keys_.count(key) || fresh.count(key) || !d.elem.vertex.below(support_)) continue;
    emit_label(store, d.label, d.elem);
  }
  const auto& bulk = store.bulk_declarations();
  for (; bulk_cursor_ < bulk.size(); ++bulk_cursor_) {
    const auto& b = bulk[bulk_cursor_];
    if (b.stage > stage) break;
    auto& seen = bulk_seen_[b.key];
    const Nat supp = std::min(support_, b.support);
    if (keys_.count(b.key) && !fresh.count(b.key)) {
      for (std::uint64_t m = 1; m < (std::uint64_t{1} << supp); ++m) {
        const CubeElem e{FinSet::from_mask(m), b.key.string, b.key.sort};
        const Nat from = m < (std::uint64_t{1} << seen.second) ? seen.first : 0;
        for (Nat k = from; k < b.label_bound; ++k) emit_label(store, k, e);
      }
    }
    seen.first = std::max(seen.first, b.label_bound);
    seen.second = std::max(seen.second, supp);
  }
}

std::unique_ptr<MirrorAdversary> make_faithful_copy(std::string name, Permutation perm,
                                                    Nat delay, Nat support) {
  return std::make_unique<MirrorAdversary>(std::move(name),
                                           MirrorSpec{std::move(perm), delay, {}}, support);
}

std::unique_ptr<MirrorAdversary> make_defective_copy(std::string name, Permutation perm,
                                                     Nat delay, std::vector<Defect> defects,
                                                     Nat support) {
  return std::make_unique<MirrorAdversary>(
      std::move(name), MirrorSpec{std::move(perm), delay, std::move(defects)}, support);
}

// ---------------------------------------------------------------------------

Materialized materialize(const StructureSnapshot& snapshot, const std::vector<StringKey>& keys,
                         Nat support) {
  Materialized out;
  const Nat count = 1U << support;
  Nat next = 0;
  if (snapshot.variant == Variant::dc) {
    out.element.emplace(0, UElem{0});
    out.element.emplace(1, UElem{1});
    next = 2;
  }
  std::set<StringKey> present(keys.begin(), keys.end());
  for (const auto& key : keys) {
    for (Nat m = 0; m < count; ++m) {
      CubeElem e{FinSet::from_mask(m), key.string, key.sort};
      out.index.emplace(e, next);
      out.element.emplace(next, e);
      out.stream.add({Rel::W, key, 0, next, 0, 0});
      ++next;
    }
  }
  for (const auto& [e, x] : out.index) {
    for (Nat i = 0; i < support; ++i) {
      CubeElem n{symm_diff(e.vertex, FinSet{i}), e.string, e.sort};
      out.stream.add({Rel::E, {}, i, x, out.index.at(n), 0});
    }
    if (!e.string.empty()) {
      StringKey parent{NatString(e.string.begin(), e.string.end() - 1), e.sort};
      if (present.count(parent)) {
        for (Nat m = 0; m < count; ++m) {
          CubeElem p{FinSet::from_mask(m), parent.string, parent.sort};
          if (holds_P(p, e)) out.stream.add({Rel::P, {}, 0, out.index.at(p), x, 0});
        }
      }
    }
    if (snapshot.variant == Variant::dc) {
      for (Nat k = 0; k < 2; ++k) {
        if (holds_P(UElem{k}, e)) out.stream.add({Rel::P, {}, 0, k, x, 0});
      }
    }
    for (Nat label : snapshot.labels(e)) {
      out.stream.add({Rel::S, {}, label, x, 0, *snapshot.store->stamp(label, e)});
    }
  }
  return out;
}

}  // namespace cubecode
