#include "cubecode/cc_construction.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "cubecode/error.hpp"
#include "cubecode/replay.hpp"

namespace cubecode {

CcConstruction::CcConstruction(CcConfig config,
                               std::vector<std::unique_ptr<Adversary>> adversaries,
                               Trace& trace)
    : config_(std::move(config)),
      adversaries_(std::move(adversaries)),
      trace_(trace),
      store_(std::make_shared<LabelStore>()),
      window_(config_.window),
      next_fresh_(config_.window.box_width) {
  if (config_.tree.empty()) config_.tree.push_back({});
  if (config_.ordering.empty()) {
    config_.ordering = default_cc_ordering(config_.tree, static_cast<Nat>(adversaries_.size()));
  }
  validate_cc_ordering(config_.ordering, config_.tree);
  for (const auto& req : config_.ordering) {
    if (req.kind == Requirement::Kind::m && req.index >= adversaries_.size()) {
      throw Error(ErrorCode::config_invalid,
                  format_requirement(req) + " has no adversary");
    }
  }
  write_trace_config(trace_, {Variant::cc, config_.window});
}

const MState* CcConstruction::m_state(NodeId id) const {
  auto it = state_.find(id);
  if (it == state_.end() || it->second.req.kind != Requirement::Kind::m) return nullptr;
  return &it->second.m;
}

std::optional<NatString> CcConstruction::chosen_by(NodeId id) const {
  auto it = state_.find(id);
  if (it == state_.end()) return std::nullopt;
  return it->second.chosen;
}

Nat CcConstruction::fresh(Nat stage) {
  const Nat m = std::max(next_fresh_, stage + 1);
  next_fresh_ = m + 1;
  return m;
}

std::string CcConstruction::assign_type(const NodeStore& nodes, NodeId id, Nat stage) {
  std::set<Requirement> above;
  for (NodeId a : nodes.path_to(id)) {
    if (a != id) above.insert(state_.at(a).req);
  }
  NodeState st;
  st.req = Requirement::idle();
  for (const auto& req : config_.ordering) {
    if (!above.count(req)) {
      st.req = req;
      break;
    }
  }
  if (st.req.kind == Requirement::Kind::m) {
    st.m.adversary = st.req.index;
    for (NodeId a : nodes.path_to(id)) {
      if (a == id) continue;
      if (auto c = state_.at(a).chosen) st.m.C.insert({*c, Sort::none});
    }
    trace_.add(stage, "MC", {std::to_string(id), join_keys(st.m.C)});
  }
  state_[id] = std::move(st);
  return format_requirement(state_[id].req);
}

bool CcConstruction::chosen_below(const NodeStore& nodes, NodeId tau, const StringKey& key,
                                  const Outcome& o) const {
  auto it = choosers_.find(key.string);
  if (it == choosers_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](NodeId rho) { return nodes.extends_outcome(rho, tau, o); });
}

Outcome CcConstruction::visit(const NodeStore& nodes, NodeId id, Nat stage) {
  NodeState& st = state_.at(id);
  const std::string ids = std::to_string(id);
  switch (st.req.kind) {
    case Requirement::Kind::n_string: {
      if (!st.chosen) {
        NatString target;
        if (!st.req.pi.empty()) {
          NatString parent_pi(st.req.pi.begin(), st.req.pi.end() - 1);
          std::optional<NatString> parent;
          for (NodeId a : nodes.path_to(id)) {
            const auto& as = state_.at(a);
            if (as.req == Requirement::n_string(parent_pi)) parent = as.chosen;
          }
          if (!parent) {
            throw Error(ErrorCode::parent_unchosen,
                        "node " + ids + " (" + format_requirement(st.req) + ")");
          }
          target = extend(*parent, fresh(stage));
        }
        st.chosen = target;
        st.chosen_at = stage;
        choosers_[target].push_back(id);
        window_.add_chosen(target);
        trace_.add(stage, "C", {ids, format_key({target, Sort::none})});
      }
      store_->grow({*st.chosen, Sort::none}, stage);
      trace_.add(stage, "GR", {ids, format_key({*st.chosen, Sort::none})});
      return Outcome::single();
    }
    case Requirement::Kind::m: {
      Adversary& adv = *adversaries_.at(st.m.adversary);
      adv.sync(*store_, window_, Variant::cc, stage);
      MContext ctx{*store_, adv, {}, {}, trace_, id, stage};
      for (const auto& s : window_.range(st.m.t)) ctx.range_keys.push_back({s, Sort::none});
      ctx.chosen_below = [&](const StringKey& key, const Outcome& o) {
        return chosen_below(nodes, id, key, o);
      };
      return m_visit(st.m, ctx);
    }
    default:
      return Outcome::single();
  }
}

void CcConstruction::end_stage(const NodeStore&, Nat stage) {
  for (const auto& s : window_.range(stage)) {
    if (choosers_.count(s)) continue;
    const StringKey key{s, Sort::none};
    if (store_->declare(0, empty_at(key), stage)) trace_.add(stage, "D", {format_key(key)});
  }
  for (auto& adv : adversaries_) adv->sync(*store_, window_, Variant::cc, stage);
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

}  // namespace

TreeQ compute_Q(const Trace& trace, Nat horizon, TruePathParams params) {
  TraceIndex index(trace, horizon);
  TreeQ out;
  std::map<NodeId, NatString> chosen;
  for (const auto& e : trace.events()) {
    if (e.stage > horizon) break;
    if (e.tag == "C") chosen[to_nat(e.fields.at(0))] = parse_key(e.fields.at(1)).string;
  }
  for (const auto& step : true_path_approx(index.nodes(), index.horizon(), params)) {
    if (step.type.size() < 2 || step.type[0] != 'N' || step.type[1] != '<') continue;
    auto it = chosen.find(step.node);
    if (it == chosen.end()) continue;
    const NatString pi = parse_requirement(step.type).pi;
    out.phi[pi] = it->second;
    out.chooser[pi] = step.node;
  }
  return out;
}

Extraction extract_isomorphism(const Trace& trace, NodeId node, const Adversary& adversary,
                               Nat horizon) {
  Extraction out;
  out.node = node;
  const std::string id = std::to_string(node);
  std::set<StringKey> C;
  std::map<StringKey, std::optional<Nat>> last_x;
  for (const auto& e : trace.events()) {
    if (e.stage > horizon) break;
    if (e.fields.empty() || e.fields[0] != id) continue;
    if (e.tag == "MC") {
      C = split_keys(e.fields.at(1));
    } else if (e.tag == "F") {
      out.f.emplace(parse_key(e.fields.at(1)), to_nat(e.fields.at(2)));
    } else if (e.tag == "X") {
      const auto& v = e.fields.at(2);
      last_x[parse_key(e.fields.at(1))] = v == "-" ? std::nullopt : std::optional<Nat>(to_nat(v));
    }
  }

  const StringWindow window = replay_window(trace, horizon);
  const FactStream& M = adversary.stream();
  const Nat support = window.params().support;

  std::vector<StringKey> deepest_first(C.begin(), C.end());
  std::stable_sort(deepest_first.begin(), deepest_first.end(),
                   [](const StringKey& a, const StringKey& b) {
                     return a.string.size() > b.string.size();
                   });
  for (const auto& sigma : deepest_first) {
    auto xit = last_x.find(sigma);
    if (xit == last_x.end() || !xit->second) continue;
    const Nat x = *xit->second;
    auto h = adversary.ground(x);
    const CubeElem* hx = h ? std::get_if<CubeElem>(&*h) : nullptr;
    if (!hx || hx->key() != sigma) {
      out.optimistic = true;
      out.f[sigma] = x;
      continue;
    }
    std::vector<Nat> J;
    for (const auto& s : window.strings()) {
      if (s.size() != sigma.string.size() + 1 || !is_prefix(sigma.string, s)) continue;
      auto fc = out.f.find({s, sigma.sort});
      if (fc == out.f.end()) continue;
      if (!M.holds_within({Rel::P, {}, 0, x, fc->second}, horizon)) J.push_back(s.back());
    }
    const CubeElem target{symm_diff(hx->vertex, FinSet(J)), sigma.string, sigma.sort};
    if (auto y = adversary.id_of(target)) {
      out.f[sigma] = *y;
    } else {
      out.optimistic = true;
      out.f[sigma] = x;
    }
  }

  std::vector<Sort> sorts{Sort::none};
  if (read_trace_config(trace).variant == Variant::dc) sorts = {Sort::zero, Sort::one};
  for (const auto& s : window.range(horizon)) {
    for (Sort sort : sorts) {
      const StringKey key{s, sort};
      auto fit = out.f.find(key);
      if (fit == out.f.end()) {
        out.stalled.push_back(empty_at(key));
        continue;
      }
      out.g[empty_at(key)] = fit->second;
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << support); ++mask) {
        const FinSet F = FinSet::from_mask(mask);
        std::optional<Nat> y;
        for (Nat j : F) {
          auto git = out.g.find({symm_diff(F, FinSet{j}), s, sort});
          if (git == out.g.end()) continue;
          y = M.e_neighbor(j, git->second, horizon);
          if (y) break;
        }
        if (y) {
          out.g[{F, s, sort}] = *y;
        } else {
          out.stalled.push_back({F, s, sort});
        }
      }
    }
  }
  return out;
}

DimensionTwo extend_to_dimension_two(const StructureSnapshot& snapshot,
                                     const std::vector<StringKey>& keys, Nat support) {
  if (snapshot.variant != Variant::cc) {
    throw Error(ErrorCode::variant_mismatch, "the gadget extends single-sorted snapshots");
  }
  Materialized m = materialize(snapshot, keys, support);
  std::ostringstream reduct;
  reduct << "# elements\n";
  for (const auto& [n, e] : m.element) reduct << "e " << n << " " << format_element(e) << "\n";
  reduct << "e a_even\ne a_odd\n# facts\n" << m.stream.dump();
  for (const auto& [elem, n] : m.index) {
    if (!elem.string.empty() || elem.sort != Sort::none) continue;
    reduct << "P " << (parity(elem.vertex) == Parity::even ? "a_even " : "a_odd ") << n
           << "\n";
  }
  DimensionTwo out;
  out.reduct = reduct.str();
  out.b0 = out.reduct + "c a_even\n";
  out.b1 = out.reduct + "c a_odd\n";
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) {
      if (line.rfind("c ", 0) == 0) continue;
      kept += line + "\n";
    }
    return kept;
  };
  out.reduct_of_b0 = strip(out.b0);
  out.reduct_of_b1 = strip(out.b1);
  return out;
}

}  // namespace cubecode
