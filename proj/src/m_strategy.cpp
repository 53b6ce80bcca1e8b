#include "cubecode/m_strategy.hpp"

#include <string>

#include "cubecode/replay.hpp"

namespace cubecode {

std::optional<Nat> MState::x_at(const StringKey& sigma, Nat stage) const {
  auto it = x.find(sigma);
  if (it == x.end()) return std::nullopt;
  auto jt = it->second.find(stage);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::vector<StringKey> children_in(const StringKey& sigma, const std::set<StringKey>& pool) {
  std::vector<StringKey> out;
  StringKey probe{extend(sigma.string, 0), sigma.sort};
  for (auto it = pool.lower_bound(probe); it != pool.end(); ++it) {
    if (it->sort != sigma.sort || it->string.size() != sigma.string.size() + 1 ||
        !is_prefix(sigma.string, it->string)) {
      // keys are ordered by string first, so children of sigma are contiguous
      // apart from other sorts interleaved and deeper descendants
      if (!is_prefix(sigma.string, it->string)) break;
      continue;
    }
    out.push_back(*it);
  }
  return out;
}

namespace {

Atom w_atom(const StringKey& key) { return {Rel::W, key}; }

}  // namespace

Outcome m_visit(MState& st, const MContext& ctx) {
  const FactStream& M = ctx.adversary.stream();
  const Nat s = ctx.stage;
  const std::string id = std::to_string(ctx.id);

  std::set<StringKey> B;
  for (const auto& key : ctx.range_keys) {
    if (st.C.count(key)) continue;
    if (ctx.chosen_below(key, Outcome::finite(st.k0))) continue;
    B.insert(key);
  }
  st.last_B = B;
  ctx.trace.add(s, "B", {id, std::to_string(st.k0), join_keys(B)});

  bool lagging = false;
  for (const auto& sigma : B) {
    auto n = ctx.store.top_label_before(sigma, st.t + 1);
    if (!n) {
      lagging = true;
      continue;
    }
    if (!st.f.count(sigma)) {
      auto found = M.oldest_satisfying({w_atom(sigma), {Rel::S, {}, *n}}, s);
      if (found) {
        st.f[sigma] = *found;
        ctx.trace.add(s, "F", {id, format_key(sigma), std::to_string(*found)});
      }
    }
    auto it = st.f.find(sigma);
    if (it == st.f.end()) {
      lagging = true;
      continue;
    }
    if (!M.holds_within({Rel::S, {}, *n, it->second}, s)) lagging = true;
  }
  if (!lagging) {
    for (const auto& sigma : B) {
      for (const auto& child : children_in(sigma, B)) {
        if (!M.holds_within({Rel::P, {}, 0, st.f.at(sigma), st.f.at(child)}, s)) {
          lagging = true;
          break;
        }
      }
      if (lagging) break;
    }
  }
  if (lagging) return Outcome::finite(st.k0);

  std::set<StringKey> D;
  for (const auto& key : B) {
    if (!ctx.chosen_below(key, Outcome::inf())) D.insert(key);
  }
  st.last_D = D;

  bool same = true;
  for (const auto& sigma : st.C) {
    std::vector<Atom> atoms{w_atom(sigma)};
    for (const auto& child : children_in(sigma, D)) {
      atoms.push_back({Rel::P, {}, 0, st.f.at(child), true});
    }
    auto now = M.oldest_satisfying(atoms, s);
    auto before = st.x_at(sigma, st.t);
    st.x[sigma][s] = now;
    ctx.trace.add(s, "X", {id, format_key(sigma), now ? std::to_string(*now) : "-"});
    if (!now || !before || *now != *before) same = false;
  }

  ++st.k0;
  st.t = s;
  if (same) return Outcome::inf_index(st.k1);
  ++st.k1;
  return Outcome::inf();
}

}  // namespace cubecode
