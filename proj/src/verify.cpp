#include "cubecode/verify.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "cubecode/engine.hpp"
#include "cubecode/error.hpp"
#include "cubecode/replay.hpp"

namespace cubecode {

// --- reports -----------------------------------------------------------------

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
}

const CheckResult* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void Report::pass(const std::string& name) {
  if (!find(name)) checks.push_back({name, true, {}, 0});
}

void Report::fail(const std::string& name, std::string locus) {
  pass(name);
  for (auto& c : checks) {
    if (c.name != name) continue;
    if (c.ok) c.locus = std::move(locus);
    c.ok = false;
    ++c.failures;
  }
}

std::string Report::str() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    if (c.ok) {
      out << "PASS " << c.name << "\n";
    } else {
      out << "FAIL " << c.name << " @ " << c.locus;
      if (c.failures > 1) out << " (" << c.failures << " failures)";
      out << "\n";
    }
  }
  return out.str();
}

// --- branches and orbits -------------------------------------------------------

std::set<NatString> labeled_tree(const StructureSnapshot& snapshot,
                                 const std::vector<StringKey>& keys, Nat support) {
  std::set<NatString> out;
  for (const auto& key : keys) {
    const auto base = snapshot.labels(empty_at(key));
    if (base.empty()) continue;
    bool same = true;
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << support) && same; ++m) {
      same = snapshot.labels({FinSet::from_mask(m), key.string, key.sort}) == base;
    }
    if (same) out.insert(key.string);
  }
  return out;
}

ElementMap automorphism_from_paths(const PathFamily& paths, const FinSet& F,
                                   const NatString& sigma, const std::set<NatString>& tree) {
  for (Nat i : F) {
    auto it = paths.branches.find(i);
    if (it == paths.branches.end()) {
      throw Error(ErrorCode::config_invalid, "no branch for color " + std::to_string(i));
    }
    if (!is_prefix(extend(sigma, i), it->second)) {
      throw Error(ErrorCode::config_invalid,
                  "branch " + format_string(it->second) + " does not extend " +
                      format_string(extend(sigma, i)));
    }
    for (std::size_t len = sigma.size() + 1; len <= it->second.size(); ++len) {
      NatString prefix(it->second.begin(), it->second.begin() + len);
      if (!tree.count(prefix)) {
        throw Error(ErrorCode::branch_outside_tree, format_string(prefix));
      }
    }
  }
  std::map<Nat, NatString> branches;
  for (Nat i : F) branches[i] = paths.branches.at(i);
  const bool odd = F.size() % 2 == 1;

  return [=](const CubeElem& e) -> CubeElem {
    const NatString& tau = e.string;
    if (tau == sigma) return {symm_diff(e.vertex, F), tau, e.sort};
    if (tau.size() < sigma.size() && is_prefix(tau, sigma)) {
      if (!odd) return e;
      return {symm_diff(e.vertex, FinSet{sigma[tau.size()]}), tau, e.sort};
    }
    if (tau.size() > sigma.size() && is_prefix(sigma, tau)) {
      auto it = branches.find(tau[sigma.size()]);
      if (it == branches.end() || !is_prefix(tau, it->second)) return e;
      if (tau.size() == it->second.size()) {
        throw Error(ErrorCode::out_of_range, "map evaluated at the tip " + format_string(tau));
      }
      return {symm_diff(e.vertex, FinSet{it->second[tau.size()]}), tau, e.sort};
    }
    return e;
  };
}

NatString path_from_automorphism(const ElementMap& g, const NatString& sigma, Nat depth) {
  const CubeElem start = g({FinSet{}, sigma, Sort::none});
  if (start.string != sigma || start.vertex.empty()) {
    throw Error(ErrorCode::config_invalid, "g does not move (0, " + format_string(sigma) +
                                               ") to a nonempty vertex");
  }
  NatString current = extend(sigma, start.vertex.elements().front());
  CubeElem previous = start;
  while (current.size() < depth) {
    const CubeElem image = g({FinSet{}, current, Sort::none});
    if (image.string != current) {
      throw Error(ErrorCode::invariant_broken,
                  "g moves (0, " + format_string(current) + ") off its cube");
    }
    if (!holds_P(previous, image)) {
      throw Error(ErrorCode::invariant_broken, "P not transferred at " + format_string(current));
    }
    if (image.vertex.empty()) {
      throw Error(ErrorCode::invariant_broken, "g fixes (0, " + format_string(current) + ")");
    }
    previous = image;
    current = extend(current, image.vertex.elements().front());
  }
  return current;
}

bool orbit_probe(const NatString& sigma, Nat i, const std::set<NatString>& tree, Nat depth) {
  const NatString start = extend(sigma, i);
  for (auto it = tree.lower_bound(start); it != tree.end() && is_prefix(start, *it); ++it) {
    if (it->size() == depth) return true;
  }
  return false;
}

// --- isomorphisms --------------------------------------------------------------

IsoCheck check_isomorphism(const std::map<CubeElem, Nat>& g, const StructureSnapshot& source,
                           const FactStream& target, Nat horizon, Nat lag) {
  IsoCheck out;
  out.elements = g.size();
  auto fail = [&](std::string why) {
    if (out.ok) out.failure = std::move(why);
    out.ok = false;
  };

  std::map<Nat, CubeElem> inverse;
  std::map<StringKey, std::vector<const CubeElem*>> by_key;
  for (const auto& [a, x] : g) {
    if (!inverse.emplace(x, a).second) {
      fail("not injective: " + format_elem(a) + " and " + format_elem(inverse.at(x)) + " -> " +
           std::to_string(x));
    }
    by_key[a.key()].push_back(&a);
  }
  auto holds = [&](Rel rel, Nat index, Nat x, Nat y, const StringKey& key = {}) {
    ++out.facts;
    return target.holds_within({rel, key, index, x, y, 0}, horizon);
  };

  for (const auto& [a, x] : g) {
    if (!holds(Rel::W, 0, x, 0, a.key())) fail("W lost at " + format_elem(a));
    for (Nat i = 0; i < 16; ++i) {
      auto b = g.find({symm_diff(a.vertex, FinSet{i}), a.string, a.sort});
      if (b == g.end()) continue;
      if (!holds(Rel::E, i, x, b->second)) fail("E" + std::to_string(i) + " lost at " + format_elem(a));
    }
    if (!a.string.empty()) {
      StringKey parent{NatString(a.string.begin(), a.string.end() - 1), a.sort};
      auto pk = by_key.find(parent);
      if (pk != by_key.end()) {
        for (const CubeElem* p : pk->second) {
          if (holds_P(*p, a) && !holds(Rel::P, 0, g.at(*p), x)) {
            fail("P lost at " + format_elem(*p) + ", " + format_elem(a));
          }
        }
      }
    }
    const Nat age = target.age(x).value_or(0);
    for (Nat label : source.labels(a)) {
      const Nat due = std::max(*source.store->stamp(label, a), age) + lag;
      if (due > horizon) continue;
      if (!holds(Rel::S, label, x, 0)) fail("S" + std::to_string(label) + " lost at " + format_elem(a));
    }
  }

  for (const auto& f : target.facts()) {
    if (f.step > horizon) continue;
    auto xa = inverse.find(f.x);
    if (xa == inverse.end()) continue;
    const CubeElem& a = xa->second;
    bool good = true;
    switch (f.rel) {
      case Rel::W: good = f.key == a.key(); break;
      case Rel::S: good = source.holds_S(f.index, a); break;
      case Rel::E:
      case Rel::P: {
        auto yb = inverse.find(f.y);
        if (yb == inverse.end()) continue;
        const CubeElem& b = yb->second;
        good = f.rel == Rel::P ? holds_P(a, b)
                               : a.key() == b.key() && edge_color(a.vertex, b.vertex) == f.index;
        break;
      }
    }
    ++out.facts;
    if (!good) fail("target fact without source preimage: " + format_fact(f));
  }
  return out;
}

IsoCheck check_automorphism(const ElementMap& map, const StructureSnapshot& snapshot,
                            const std::vector<StringKey>& keys, Nat support) {
  Materialized m = materialize(snapshot, keys, support);
  std::map<CubeElem, Nat> g;
  for (const auto& [a, x] : m.index) {
    const CubeElem image = map(a);
    auto it = m.index.find(image);
    if (it == m.index.end()) {
      IsoCheck out;
      out.ok = false;
      out.failure = "image of " + format_elem(a) + " outside the domain";
      return out;
    }
    g[a] = it->second;
  }
  return check_isomorphism(g, snapshot, m.stream, snapshot.stage);
}

// --- labeling ------------------------------------------------------------------

namespace {

std::vector<StringKey> keys_for(Variant variant, const NatString& s) {
  if (variant == Variant::cc) return {{s, Sort::none}};
  return {{s, Sort::zero}, {s, Sort::one}};
}

Nat to_nat(std::string_view text) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse_error, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Report check_labeling(const Trace& trace, const std::set<NatString>& chosen, Nat early,
                      Nat late) {
  Report report;
  report.pass("labels-grow");
  report.pass("unchosen-stable");
  report.pass("unchosen-empty-only");
  const TraceConfig cfg = read_trace_config(trace);
  const LabelStore store = replay_store(trace, late);
  const auto choices = replay_choices(trace, early);
  const StringWindow window = replay_window(trace, early);
  const Nat support = cfg.window.support;

  for (const auto& s : chosen) {
    for (const auto& key : keys_for(cfg.variant, s)) {
      if (!store.stamp(0, empty_at(key))) continue;  // the other sort of a dc pair
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << support); ++m) {
        const CubeElem e{FinSet::from_mask(m), key.string, key.sort};
        if (store.labels(e, late).size() <= store.labels(e, early).size()) {
          report.fail("labels-grow", format_elem(e));
        }
      }
    }
  }
  for (const auto& s : window.range(early)) {
    for (const auto& key : keys_for(cfg.variant, s)) {
      if (choices.count(key)) continue;
      if (cfg.variant == Variant::dc && key.string.empty()) continue;  // G grows both roots
      auto n_early = store.top_label_before(key, early + 1);
      auto n_late = store.top_label_before(key, late + 1);
      if (n_early != n_late) {
        report.fail("unchosen-stable", format_key(key));
        continue;
      }
      if (!n_late) continue;
      for (std::uint64_t m = 1; m < (std::uint64_t{1} << support); ++m) {
        const CubeElem e{FinSet::from_mask(m), key.string, key.sort};
        if (store.holds(*n_late, e, late)) report.fail("unchosen-empty-only", format_elem(e));
      }
    }
  }
  return report;
}

// --- back and forth --------------------------------------------------------------

namespace {

class BackAndForth {
 public:
  BackAndForth(const StructureSnapshot& snapshot, std::vector<CubeElem> universe)
      : snapshot_(snapshot), universe_(std::move(universe)) {
    for (const auto& e : universe_) labels_.push_back(snapshot_.labels(e));
  }

  std::size_t index(const CubeElem& e) const {
    auto it = std::find(universe_.begin(), universe_.end(), e);
    if (it == universe_.end()) {
      throw Error(ErrorCode::out_of_range, format_elem(e) + " outside the bounded universe");
    }
    return static_cast<std::size_t>(it - universe_.begin());
  }

  bool equiv(std::vector<std::size_t>& a, std::vector<std::size_t>& b, Nat alpha) {
    if (!same_atomic(a, b)) return false;
    if (alpha == 0) return true;
    auto memo_key = std::make_tuple(a, b, alpha);
    if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    bool ok = forth(a, b, alpha) && forth(b, a, alpha);
    memo_[memo_key] = ok;
    return ok;
  }

  std::size_t size() const { return universe_.size(); }

 private:
  // every extension of a is matched by some extension of b
  bool forth(std::vector<std::size_t>& a, std::vector<std::size_t>& b, Nat alpha) {
    for (std::size_t c = 0; c < universe_.size(); ++c) {
      a.push_back(c);
      bool matched = false;
      for (std::size_t d = 0; d < universe_.size() && !matched; ++d) {
        b.push_back(d);
        matched = equiv(a, b, alpha - 1);
        b.pop_back();
      }
      a.pop_back();
      if (!matched) return false;
    }
    return true;
  }

  bool same_atomic(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const CubeElem& x = universe_[a[i]];
      const CubeElem& y = universe_[b[i]];
      if (x.key() != y.key() || labels_[a[i]] != labels_[b[i]]) return false;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const CubeElem& x2 = universe_[a[j]];
        const CubeElem& y2 = universe_[b[j]];
        if ((a[i] == a[j]) != (b[i] == b[j])) return false;
        const auto ex = x.key() == x2.key() ? edge_color(x.vertex, x2.vertex) : std::nullopt;
        const auto ey = y.key() == y2.key() ? edge_color(y.vertex, y2.vertex) : std::nullopt;
        if (ex != ey) return false;
        if (holds_P(x, x2) != holds_P(y, y2)) return false;
      }
    }
    return true;
  }

  const StructureSnapshot& snapshot_;
  std::vector<CubeElem> universe_;
  std::vector<std::vector<Nat>> labels_;
  std::map<std::tuple<std::vector<std::size_t>, std::vector<std::size_t>, Nat>, bool> memo_;
};

}  // namespace

BfResult bf_equiv(const std::vector<CubeElem>& a, const std::vector<CubeElem>& b, Nat alpha,
                  const StructureSnapshot& snapshot, const std::vector<StringKey>& keys,
                  Nat support) {
  std::vector<CubeElem> universe;
  for (const auto& key : keys) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << support); ++m) {
      universe.push_back({FinSet::from_mask(m), key.string, key.sort});
    }
  }
  BackAndForth game(snapshot, universe);
  std::vector<std::size_t> ia, ib;
  for (const auto& e : a) ia.push_back(game.index(e));
  for (const auto& e : b) ib.push_back(game.index(e));
  BfResult out;
  out.alpha = alpha;
  out.support = support;
  out.universe = game.size();
  out.equivalent = game.equiv(ia, ib, alpha);
  return out;
}

// --- trace invariants ------------------------------------------------------------

Report check_trace_invariants(const Trace& trace) {
  Report report;
  for (const char* name : {"b-monotone", "b-equal", "left-kill", "n-sigma-defined", "g-coverage",
                           "gamma-length"}) {
    report.pass(name);
  }
  if (trace.events().empty()) return report;
  const TraceConfig cfg = read_trace_config(trace);
  const char* discipline = cfg.variant == Variant::cc ? "choose-once" : "steal-only-by-u";
  report.pass(discipline);

  const TraceIndex index(trace);
  const NodeStore& nodes = index.nodes();
  auto where = [&](NodeId id, Nat stage) {
    return "node " + std::to_string(id) + " " + format_address(nodes.address(id)) + " stage " +
           std::to_string(stage);
  };

  // B sets per M node against its infinite outcomes
  std::map<NodeId, std::vector<std::pair<Nat, std::set<StringKey>>>> b_sets;
  for (const auto& e : trace.events()) {
    if (e.tag == "B") b_sets[to_nat(e.fields.at(0))].emplace_back(e.stage, split_keys(e.fields.at(2)));
  }
  for (const auto& [id, seq] : b_sets) {
    const auto& history = nodes[id].history;
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const auto& [s0, b0] = seq[k - 1];
      const auto& [s1, b1] = seq[k];
      if (!std::includes(b1.begin(), b1.end(), b0.begin(), b0.end())) {
        report.fail("b-monotone", where(id, s1));
      }
      const bool infinite_between = std::any_of(history.begin(), history.end(), [&](const auto& h) {
        return h.first >= s0 && h.first < s1 && h.second.infinite();
      });
      if (!infinite_between && b0 != b1) report.fail("b-equal", where(id, s1));
    }
  }

  if (auto lk = check_left_kill(index); !lk.ok) report.fail("left-kill", where(*lk.node, lk.stage));

  // choosing discipline
  std::map<StringKey, Nat> chosen_at;
  std::map<NodeId, std::size_t> choices_per_node;
  for (const auto& e : trace.events()) {
    if (e.tag != "C" && e.tag != "ST") continue;
    const NodeId id = to_nat(e.fields.at(0));
    const StringKey key = parse_key(e.fields.at(1));
    if (e.tag == "ST") {
      if (nodes[id].type.empty() || nodes[id].type[0] != 'U') {
        report.fail(discipline, where(id, e.stage) + " steals " + format_key(key));
      }
      continue;
    }
    if (!chosen_at.emplace(key, e.stage).second) {
      report.fail(discipline, where(id, e.stage) + " rechooses " + format_key(key));
    }
    if (cfg.variant == Variant::cc && ++choices_per_node[id] > 1) {
      report.fail(discipline, where(id, e.stage) + " chooses twice");
    }
  }

  // labels: G covers unchosen strings, n_sigma defined one stage later
  const LabelStore store = replay_store(trace);
  const StringWindow window = replay_window(trace);
  for (Nat s = 1; s <= index.horizon(); ++s) {
    for (const auto& str : window.range(s)) {
      for (const auto& key : keys_for(cfg.variant, str)) {
        auto c = chosen_at.find(key);
        const bool chosen = c != chosen_at.end() && c->second <= s;
        if (!chosen && !store.holds(0, empty_at(key), s)) {
          report.fail("g-coverage", format_key(key) + " stage " + std::to_string(s));
        }
        if (s + 1 <= index.horizon() && !store.top_label_before(key, s + 1)) {
          report.fail("n-sigma-defined", format_key(key) + " stage " + std::to_string(s + 1));
        }
      }
    }
  }

  for (const auto& e : trace.events()) {
    if (e.tag != "GAM") continue;
    const Nat n = to_nat(e.fields.at(1));
    if (parse_string(e.fields.at(2)).size() != n) {
      report.fail("gamma-length", where(to_nat(e.fields.at(0)), e.stage));
    }
  }
  return report;
}

}  // namespace cubecode
