#include "cubecode/dc_construction.hpp"

#include <algorithm>
#include <charconv>

#include "cubecode/error.hpp"
#include "cubecode/replay.hpp"

namespace cubecode {

namespace {

Sort sort_of(Nat a) { return a == 0 ? Sort::zero : Sort::one; }

std::string join_ids(const std::vector<NodeId>& ids) {
  if (ids.empty()) return "-";
  std::string out;
  for (NodeId id : ids) {
    if (!out.empty()) out += ';';
    out += std::to_string(id);
  }
  return out;
}

}  // namespace

DcConstruction::DcConstruction(DcConfig config,
                               std::vector<std::unique_ptr<Adversary>> adversaries,
                               Trace& trace)
    : config_(std::move(config)),
      adversaries_(std::move(adversaries)),
      trace_(trace),
      store_(std::make_shared<LabelStore>()),
      window_(config_.window),
      halting_(config_.witness_base),
      next_fresh_(config_.window.box_width) {
  if (config_.ordering.empty()) {
    config_.shape.adversaries = static_cast<Nat>(adversaries_.size());
    config_.ordering = default_dc_ordering(config_.shape);
  }
  validate_dc_ordering(config_.ordering);
  for (const auto& req : config_.ordering) {
    if (req.kind == Requirement::Kind::m && req.index >= adversaries_.size()) {
      throw Error(ErrorCode::config_invalid, format_requirement(req) + " has no adversary");
    }
    if (req.kind == Requirement::Kind::u && req.e >= config_.functionals.size()) {
      throw Error(ErrorCode::config_invalid, format_requirement(req) + " has no functional");
    }
  }
  write_trace_config(trace_, {Variant::dc, config_.window});
}

const MState* DcConstruction::m_state(NodeId id) const {
  auto it = state_.find(id);
  if (it == state_.end() || it->second.req.kind != Requirement::Kind::m) return nullptr;
  return &it->second.m;
}

Nat DcConstruction::fresh(Nat stage) {
  const Nat m = std::max(next_fresh_, stage + 1);
  next_fresh_ = m + 1;
  return m;
}

std::optional<NodeId> DcConstruction::mother_of(const NodeStore& nodes, NodeId id, Nat r,
                                                Nat a) const {
  for (NodeId p : nodes.path_to(id)) {
    if (p == id) break;
    if (state_.at(p).req == Requirement::mother(r, a)) return p;
  }
  return std::nullopt;
}

Nat DcConstruction::daughters_above(const NodeStore& nodes, NodeId tau, NodeId psi) const {
  const Requirement& m = state_.at(psi).req;
  Nat best = 0;
  for (NodeId p : nodes.path_to(tau)) {
    if (p == tau) break;
    const Requirement& q = state_.at(p).req;
    if (q.kind == Requirement::Kind::daughter && q.r == m.r && q.a == m.a) {
      best = std::max(best, q.n);
    }
  }
  return best;
}

std::vector<Requirement> DcConstruction::blocked_types(const NodeStore& nodes, NodeId tau) const {
  std::vector<Requirement> out;
  for (NodeId rho : nodes.path_to(tau)) {
    if (rho == tau) break;
    const NodeState& st = state_.at(rho);
    if (st.req.kind != Requirement::Kind::u || !st.frozen) continue;
    if (nodes.outcome_toward(tau, rho) != Outcome::finite(1)) continue;
    for (const auto& [psi, str] : st.stolen) {
      const Requirement& m = state_.at(psi).req;
      for (Nat n = daughters_above(nodes, rho, psi) + 1; n < str.size(); ++n) {
        out.push_back(Requirement::daughter(m.r, n, m.a));
      }
    }
  }
  return out;
}

bool DcConstruction::allowed(const NodeStore& nodes, NodeId tau, const Requirement& req) const {
  using K = Requirement::Kind;
  if (req.kind == K::daughter) {
    if (!mother_of(nodes, tau, req.r, req.a)) return false;
    const auto blocked = blocked_types(nodes, tau);
    return std::find(blocked.begin(), blocked.end(), req) == blocked.end();
  }
  if (req.kind == K::u) {
    for (NodeId rho : nodes.path_to(tau)) {
      if (rho == tau) break;
      const NodeState& st = state_.at(rho);
      if (st.req.kind != K::u || !st.frozen) continue;
      if (nodes.outcome_toward(tau, rho) != Outcome::finite(1)) continue;
      for (NodeId psi : nodes.path_to(rho)) {
        if (psi == rho) break;
        if (state_.at(psi).req.kind != K::mother) continue;
        if (daughters_above(nodes, tau, psi) <= st.ell) return false;
      }
    }
  }
  return true;
}

std::string DcConstruction::assign_type(const NodeStore& nodes, NodeId id, Nat stage) {
  std::set<Requirement> above;
  for (NodeId p : nodes.path_to(id)) {
    if (p != id) above.insert(state_.at(p).req);
  }
  NodeState st;
  st.req = Requirement::idle();
  state_[id] = st;  // ancestors-only lookups below never touch it
  for (const auto& req : config_.ordering) {
    if (above.count(req) || !allowed(nodes, id, req)) continue;
    st.req = req;
    break;
  }
  const std::string ids = std::to_string(id);
  if (st.req.kind == Requirement::Kind::u) {
    std::optional<NodeId> theta;
    std::vector<std::pair<Nat, NodeId>> g_mothers;
    for (NodeId p : nodes.path_to(id)) {
      if (p == id) break;
      const NodeState& ps = state_.at(p);
      if (ps.req.kind != Requirement::Kind::mother) continue;
      if (ps.req.a == 0 && ps.v == st.req.i) theta = p;
      if (ps.req.a == 1 && ps.v < st.req.i) g_mothers.emplace_back(ps.v, p);
    }
    if (theta) {
      st.active = true;
      std::sort(g_mothers.begin(), g_mothers.end());
      st.C.push_back(*theta);
      for (const auto& [v, p] : g_mothers) st.C.push_back(p);
      st.witness = halting_.reserve();
      trace_.add(stage, "UC", {ids, join_ids(st.C)});
      trace_.add(stage, "XW", {ids, std::to_string(st.witness)});
    }
  } else if (st.req.kind == Requirement::Kind::m) {
    st.m.adversary = st.req.index;
    st.m.C = m_fixed_pairs(nodes, id);
    trace_.add(stage, "MC", {ids, join_keys(st.m.C)});
  }
  state_[id] = std::move(st);
  return format_requirement(state_[id].req);
}

std::set<StringKey> DcConstruction::m_fixed_pairs(const NodeStore& nodes, NodeId id) const {
  std::set<StringKey> out;
  for (NodeId rho : nodes.path_to(id)) {
    if (rho == id) break;
    const NodeState& st = state_.at(rho);
    switch (st.req.kind) {
      case Requirement::Kind::mother:
        out.insert({NatString{st.v}, sort_of(st.req.a)});
        break;
      case Requirement::Kind::daughter: {
        auto it = st.sigma.find(*nodes.outcome_toward(id, rho));
        if (it != st.sigma.end()) out.insert({it->second, sort_of(st.req.a)});
        break;
      }
      case Requirement::Kind::u:
        if (!st.frozen || nodes.outcome_toward(id, rho) != Outcome::finite(1)) break;
        for (const auto& [psi, str] : st.stolen) {
          out.insert({str, sort_of(state_.at(psi).req.a)});
        }
        break;
      default:
        break;
    }
  }
  return out;
}

NatString DcConstruction::resolve_gamma(const NodeStore& nodes, NodeId id) const {
  const Requirement& req = state_.at(id).req;
  auto theta = mother_of(nodes, id, req.r, req.a);
  if (!theta) throw Error(ErrorCode::unresolved, "daughter " + std::to_string(id) + " has no mother");
  const Nat v = state_.at(*theta).v;
  auto path = nodes.path_to(id);
  path.pop_back();
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const NodeId rho = *it;
    const NodeState& st = state_.at(rho);
    if (rho == *theta) return NatString{v};
    if (st.req == Requirement::daughter(req.r, req.n - 1, req.a)) {
      auto s = st.sigma.find(*nodes.outcome_toward(id, rho));
      if (s != st.sigma.end()) return s->second;
    }
    if (st.req.kind == Requirement::Kind::u && st.frozen &&
        nodes.outcome_toward(id, rho) == Outcome::finite(1) &&
        ((req.a == 0 && st.req.i == v) || (req.a == 1 && st.req.i > v))) {
      auto s = st.stolen.find(*theta);
      if (s != st.stolen.end()) return s->second;
    }
  }
  throw Error(ErrorCode::unresolved, "daughter " + std::to_string(id));
}

void DcConstruction::grow(NodeId id, const StringKey& key, Nat stage) {
  store_->grow(key, stage);
  trace_.add(stage, "GR", {std::to_string(id), format_key(key)});
}

void DcConstruction::choose(NodeId id, const StringKey& key, Nat stage, bool stolen) {
  choosers_[key].push_back(id);
  window_.add_chosen(key.string);
  trace_.add(stage, stolen ? "ST" : "C", {std::to_string(id), format_key(key)});
}

Outcome DcConstruction::visit(const NodeStore& nodes, NodeId id, Nat stage) {
  NodeState& st = state_.at(id);
  switch (st.req.kind) {
    case Requirement::Kind::mother: return visit_mother(id, st, stage);
    case Requirement::Kind::daughter: return visit_daughter(nodes, id, st, stage);
    case Requirement::Kind::u: return visit_u(nodes, id, st, stage);
    case Requirement::Kind::m: return visit_m(nodes, id, st, stage);
    default: return Outcome::single();
  }
}

Outcome DcConstruction::visit_mother(NodeId id, NodeState& st, Nat stage) {
  if (!st.started) {
    st.started = true;
    st.v = fresh(stage);
    choose(id, {NatString{st.v}, sort_of(st.req.a)}, stage, false);
  }
  grow(id, {NatString{st.v}, sort_of(st.req.a)}, stage);
  return Outcome::single();
}

Outcome DcConstruction::visit_daughter(const NodeStore& nodes, NodeId id, NodeState& st,
                                       Nat stage) {
  const NatString gamma = resolve_gamma(nodes, id);
  const std::string ids = std::to_string(id);
  trace_.add(stage, "GAM", {ids, std::to_string(st.req.n), format_string(gamma)});
  bool success = false;
  for (Nat q = st.last_inf; q < stage && !success; ++q) success = config_.phi.holds(st.req.n, q);
  const Outcome beta = success ? Outcome::inf() : Outcome::finite(st.inf_count);
  if (success) {
    ++st.inf_count;
    st.last_inf = stage;
  }
  auto it = st.sigma.find(beta);
  if (it == st.sigma.end()) {
    if (st.sigma.empty()) daughters_.push_back(id);
    it = st.sigma.emplace(beta, extend(gamma, stage)).first;
    trace_.add(stage, "SG", {ids, format_outcome(beta), format_string(it->second)});
    choose(id, {it->second, sort_of(st.req.a)}, stage, false);
  }
  grow(id, {it->second, sort_of(st.req.a)}, stage);
  return beta;
}

Outcome DcConstruction::visit_u(const NodeStore& nodes, NodeId id, NodeState& st, Nat stage) {
  if (!st.active) return Outcome::finite(0);
  const std::string ids = std::to_string(id);
  if (!st.frozen) {
    // candidate (pi, alpha) strings per psi in C, below tau^0
    std::vector<std::vector<std::pair<NodeId, const NatString*>>> pools;
    for (NodeId psi : st.C) {
      const Requirement& m = state_.at(psi).req;
      std::vector<std::pair<NodeId, const NatString*>> pool;
      for (NodeId pi : daughters_) {
        const NodeState& ps = state_.at(pi);
        if (ps.req.r != m.r || ps.req.a != m.a) continue;
        if (!nodes.extends_outcome(pi, id, Outcome::finite(0))) continue;
        for (const auto& [alpha, str] : ps.sigma) pool.emplace_back(pi, &str);
      }
      if (pool.empty()) return Outcome::finite(0);
      pools.push_back(std::move(pool));
    }
    const Functional& phi_e = config_.functionals.at(st.req.e);
    std::vector<std::size_t> pick(pools.size(), 0);
    std::vector<NatString> oracle(pools.size());
    bool found = false;
    for (std::size_t tried = 0; tried < config_.witness_search_cap; ++tried) {
      for (std::size_t k = 0; k < pools.size(); ++k) oracle[k] = *pools[k][pick[k]].second;
      auto out = phi_e.run(oracle, st.witness, stage);
      if (out && *out == 0) {
        found = true;
        break;
      }
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == pools[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
    if (!found) return Outcome::finite(0);

    st.frozen = true;
    halting_.enumerate(st.witness, stage);
    trace_.add(stage, "E0", {std::to_string(st.witness)});
    for (std::size_t k = 0; k < st.C.size(); ++k) {
      const NodeId psi = st.C[k];
      st.stolen[psi] = oracle[k];
      st.ell = std::max<Nat>(st.ell, static_cast<Nat>(oracle[k].size()));
      trace_.add(stage, "SU", {ids, std::to_string(psi), format_string(oracle[k])});
      choose(id, {oracle[k], sort_of(state_.at(psi).req.a)}, stage, true);
    }
    trace_.add(stage, "FZ", {ids, std::to_string(st.witness), std::to_string(st.ell)});
  }
  for (NodeId psi : st.C) grow(id, {st.stolen.at(psi), sort_of(state_.at(psi).req.a)}, stage);
  return Outcome::finite(1);
}

Outcome DcConstruction::visit_m(const NodeStore& nodes, NodeId id, NodeState& st, Nat stage) {
  Adversary& adv = *adversaries_.at(st.m.adversary);
  adv.sync(*store_, window_, Variant::dc, stage);
  MContext ctx{*store_, adv, {}, {}, trace_, id, stage};
  for (const auto& s : window_.range(st.m.t)) {
    ctx.range_keys.push_back({s, Sort::zero});
    ctx.range_keys.push_back({s, Sort::one});
  }
  ctx.chosen_below = [&](const StringKey& key, const Outcome& o) {
    auto it = choosers_.find(key);
    if (it == choosers_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](NodeId rho) { return nodes.extends_outcome(rho, id, o); });
  };
  return m_visit(st.m, ctx);
}

void DcConstruction::end_stage(const NodeStore&, Nat stage) {
  for (const auto& s : window_.range(stage)) {
    for (Sort sort : {Sort::zero, Sort::one}) {
      const StringKey key{s, sort};
      if (store_->declare(0, empty_at(key), stage)) trace_.add(stage, "D", {format_key(key)});
    }
  }
  for (Sort sort : {Sort::zero, Sort::one}) {
    const StringKey key{{}, sort};
    store_->grow(key, stage);
    trace_.add(stage, "GR", {"G", format_key(key)});
  }
  for (auto& adv : adversaries_) adv->sync(*store_, window_, Variant::dc, stage);
}

// --- analysis ----------------------------------------------------------------

namespace {

Nat to_nat(std::string_view text) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse_error, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<NodeId> split_ids(std::string_view text) {
  std::vector<NodeId> out;
  if (text == "-") return out;
  while (!text.empty()) {
    auto semi = text.find(';');
    out.push_back(to_nat(text.substr(0, semi)));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return out;
}

// Per-node facts recorded by the dc strategies.
struct DcEvents {
  std::map<NodeId, StringKey> mother_key;
  std::map<std::pair<NodeId, Outcome>, NatString> sigma;
  std::map<NodeId, std::vector<std::pair<NodeId, NatString>>> stolen;
  std::map<NodeId, std::vector<NodeId>> u_C;
  std::map<NodeId, Nat> witness;
  std::map<NodeId, Nat> frozen_at;
  std::set<Nat> enumerated;

  DcEvents(const Trace& trace, Nat horizon) {
    for (const auto& e : trace.events()) {
      if (e.stage > horizon) break;
      if (e.tag == "C") {
        const NodeId id = to_nat(e.fields.at(0));
        mother_key.emplace(id, parse_key(e.fields.at(1)));  // first choice is the mother's
      } else if (e.tag == "SG") {
        sigma[{to_nat(e.fields.at(0)), parse_outcome(e.fields.at(1))}] = parse_string(e.fields.at(2));
      } else if (e.tag == "SU") {
        stolen[to_nat(e.fields.at(0))].emplace_back(to_nat(e.fields.at(1)),
                                                    parse_string(e.fields.at(2)));
      } else if (e.tag == "UC") {
        u_C[to_nat(e.fields.at(0))] = split_ids(e.fields.at(1));
      } else if (e.tag == "XW") {
        witness[to_nat(e.fields.at(0))] = to_nat(e.fields.at(1));
      } else if (e.tag == "FZ") {
        frozen_at[to_nat(e.fields.at(0))] = e.stage;
      } else if (e.tag == "E0") {
        enumerated.insert(to_nat(e.fields.at(0)));
      }
    }
  }
};

}  // namespace

const PathPrefix* ExtractedPaths::f(Nat i) const {
  for (const auto& p : paths) {
    if (p.a == 0 && p.v == i) return &p;
  }
  return nullptr;
}

const PathPrefix* ExtractedPaths::g(Nat j) const {
  for (const auto& p : paths) {
    if (p.a == 1 && p.v == j) return &p;
  }
  return nullptr;
}

const PathPrefix* ExtractedPaths::by_mother(NodeId id) const {
  for (const auto& p : paths) {
    if (p.mother == id) return &p;
  }
  return nullptr;
}

ExtractedPaths extract_paths(const Trace& trace, Nat horizon, TruePathParams params) {
  const TraceIndex index(trace, horizon);
  const DcEvents ev(trace, horizon);
  ExtractedPaths out;
  std::map<std::pair<Nat, Nat>, std::size_t> slot;       // (r, a) -> paths index
  std::map<std::size_t, std::vector<NatString>> pieces;  // paths index -> strings
  std::map<std::size_t, Nat> last_daughter;

  for (const auto& step : true_path_approx(index.nodes(), index.horizon(), params)) {
    if (step.type == "idle" || step.type.empty()) continue;
    const Requirement req = parse_requirement(step.type);
    if (req.kind == Requirement::Kind::mother) {
      auto key = ev.mother_key.find(step.node);
      if (key == ev.mother_key.end()) continue;
      PathPrefix p;
      p.mother = step.node;
      p.r = req.r;
      p.a = req.a;
      p.v = key->second.string.at(0);
      slot[{req.r, req.a}] = out.paths.size();
      pieces[out.paths.size()].push_back(key->second.string);
      out.paths.push_back(p);
    } else if (req.kind == Requirement::Kind::daughter && step.outcome) {
      auto k = slot.find({req.r, req.a});
      auto s = ev.sigma.find({step.node, *step.outcome});
      if (k == slot.end() || s == ev.sigma.end()) continue;
      pieces[k->second].push_back(s->second);
      last_daughter[k->second] = req.n;
    } else if (req.kind == Requirement::Kind::u && step.outcome == Outcome::finite(1)) {
      auto st = ev.stolen.find(step.node);
      if (st == ev.stolen.end()) continue;
      for (const auto& [psi, str] : st->second) {
        std::optional<std::size_t> which;
        for (std::size_t k = 0; k < out.paths.size(); ++k) {
          if (out.paths[k].mother == psi) which = k;
        }
        if (!which) continue;
        pieces[*which].push_back(str);
        for (Nat n = last_daughter[*which] + 1; n < str.size(); ++n) {
          out.paths[*which].by_u[n] = step.node;
        }
      }
    }
  }

  for (auto& [k, strs] : pieces) {
    std::stable_sort(strs.begin(), strs.end(),
                     [](const NatString& x, const NatString& y) { return x.size() < y.size(); });
    for (std::size_t m = 1; m < strs.size(); ++m) {
      if (!is_prefix(strs[m - 1], strs[m])) {
        throw Error(ErrorCode::inconsistent_prefixes,
                    format_string(strs[m - 1]) + " vs " + format_string(strs[m]) +
                        " for mother " + std::to_string(out.paths[k].mother));
      }
    }
    out.paths[k].prefix = strs.back();
  }
  return out;
}

ModulusVerdict modulus_check(Nat i, Nat j, Nat n, const ExtractedPaths& paths,
                             const PhiPredicate& phi, Nat horizon) {
  const PhiRow& row = phi.row(n);
  if (!(i < j && j < n)) {
    throw Error(ErrorCode::out_of_range, "need i < j < n");
  }
  const PathPrefix* f = paths.f(i);
  const PathPrefix* g = paths.g(j);
  if (!f || !g || f->prefix.size() <= n || g->prefix.size() <= n) {
    throw Error(ErrorCode::out_of_range, "paths f_" + std::to_string(i) + ", g_" +
                                             std::to_string(j) + " not defined at " +
                                             std::to_string(n));
  }
  ModulusVerdict out;
  out.bound = f->prefix[n] + g->prefix[n];
  if (row.in_Z()) return out;
  out.checked = true;
  for (Nat s = out.bound + 1; s <= horizon; ++s) {
    if (phi.holds(n, s)) {
      out.ok = false;
      out.detail = "phi(" + std::to_string(n) + ", " + std::to_string(s) + ") beyond " +
                   std::to_string(out.bound);
      break;
    }
  }
  return out;
}

ModulusVerdict modulus_check(Nat i, Nat j, Nat n, const Trace& trace, const PhiPredicate& phi,
                             Nat horizon) {
  return modulus_check(i, j, n, extract_paths(trace, horizon), phi, horizon);
}

std::vector<DiagonalizationReport> check_diagonalization(
    const Trace& trace, const std::vector<Functional>& functionals, Nat horizon,
    TruePathParams params) {
  const TraceIndex index(trace, horizon);
  const DcEvents ev(trace, horizon);
  const ExtractedPaths paths = extract_paths(trace, horizon, params);
  std::vector<DiagonalizationReport> out;
  for (const auto& step : true_path_approx(index.nodes(), index.horizon(), params)) {
    if (step.type.empty() || step.type[0] != 'U') continue;
    const Requirement req = parse_requirement(step.type);
    DiagonalizationReport r;
    r.node = step.node;
    r.i = req.i;
    r.e = req.e;
    auto w = ev.witness.find(step.node);
    r.active = w != ev.witness.end();
    if (!r.active) {
      r.consistent = true;
      out.push_back(r);
      continue;
    }
    r.witness = w->second;
    if (auto fz = ev.frozen_at.find(step.node); fz != ev.frozen_at.end()) {
      r.frozen = true;
      r.frozen_at = fz->second;
    }
    r.witness_enumerated = ev.enumerated.count(r.witness) != 0;
    std::vector<NatString> oracle;
    for (NodeId psi : ev.u_C.at(step.node)) {
      const PathPrefix* p = paths.by_mother(psi);
      oracle.push_back(p ? p->prefix : NatString{});
    }
    if (req.e >= functionals.size()) {
      throw Error(ErrorCode::config_invalid, "no functional " + std::to_string(req.e));
    }
    r.output = functionals[req.e].run(oracle, r.witness, horizon);
    const bool halts_zero = r.output && *r.output == 0;
    r.consistent = r.frozen ? (r.witness_enumerated && halts_zero) : !halts_zero;
    out.push_back(r);
  }
  return out;
}

FinalStructure assemble_final_structure(const StructureSnapshot& snapshot) {
  if (snapshot.variant != Variant::dc) {
    throw Error(ErrorCode::variant_mismatch, "constants c, d belong to the two-sorted structure");
  }
  return {snapshot, UElem{0}, CubeElem{FinSet{}, {}, Sort::one}};
}

}  // namespace cubecode
