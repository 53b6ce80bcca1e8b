// Acceptance driver: one PASS / FAIL line per criterion, each with its own
// wall-clock limit. Exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>

#include "branch_fixture.hpp"
#include "cubecode/config.hpp"
#include "cubecode/cube_space.hpp"
#include "cubecode/replay.hpp"
#include "cubecode/suites.hpp"

using namespace cubecode;

namespace {

std::string config_path(const std::string& name) {
  return std::string(CUBECODE_SOURCE_DIR) + "/tools/configs/" + name + ".json";
}

// one run per config, shared between criteria
std::map<std::string, std::unique_ptr<Run>> g_runs;

Run& run_of(const std::string& name) {
  auto& slot = g_runs[name];
  if (!slot) {
    slot = std::make_unique<Run>(load_run_config(config_path(name)));
    slot->execute();
  }
  return *slot;
}

NodeId node_of_type(Run& run, const std::string& type) {
  for (const auto& st : true_path_approx(run.nodes(), run.config().horizon, run.config().true_path)) {
    if (st.type == type) return st.node;
  }
  throw std::runtime_error(type + " not on the true path");
}

struct Verdict {
  bool ok = false;
  std::string note;
};

int g_failed = 0;

void criterion(int n, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    v.ok = false;
    v.note += " over the " + std::to_string(static_cast<int>(limit_s)) + " s limit";
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << n << " [" << timing << "] " << v.note << "\n";
  std::cout.flush();
  if (!v.ok) ++g_failed;
}

// --- 1 ---------------------------------------------------------------------

Verdict cube_automorphisms() {
  // color-preserving bijections of the d-cube are exactly the translations
  for (Nat d = 0; d <= 4; ++d) {
    std::set<CubeMap> want;
    for (std::uint64_t h = 0; h < (1U << d); ++h) want.insert(translation_map(d, FinSet::from_mask(h)));
    const auto got = enumerate_cube_automorphisms(d);
    if (std::set<CubeMap>(got.begin(), got.end()) != want || got.size() != want.size()) {
      return {false, "dimension " + std::to_string(d) + " disagrees"};
    }
  }
  return {true, "d<=3 exhaustive and d=4 match the 2^d translations"};
}

// --- 2 ---------------------------------------------------------------------

Verdict branch_round_trip() {
  struct Case {
    std::uint32_t seed;
    NatString sigma;
    FinSet F;
  };
  const std::vector<Case> cases{{1, {}, FinSet{0}},        {2, {2}, FinSet{0, 1}},
                                {3, {0, 1}, FinSet{2}},     {4, {1}, FinSet{0, 1, 2}},
                                {5, {2, 2, 0}, FinSet{1}},  {6, {}, FinSet{1, 2}}};
  for (const auto& c : cases) {
    const auto t = branch_fixture::make_test_tree(c.seed, c.sigma, c.F);
    const ElementMap g = automorphism_from_paths(t.paths, t.F, t.sigma, t.tree);
    const IsoCheck iso = check_automorphism(g, t.snapshot(), t.keys, t.support);
    if (!iso.ok) return {false, "tree " + std::to_string(c.seed) + ": " + iso.failure};
    const NatString& h = t.paths.branches.at(t.F.elements().front());
    const NatString back = path_from_automorphism(g, t.sigma, 11);
    if (back.size() < 11 || !is_prefix(back, h)) {
      return {false, "tree " + std::to_string(c.seed) + ": recovered " + format_string(back)};
    }
  }
  return {true, std::to_string(cases.size()) + " trees, branches to depth 12, prefixes of length 11"};
}

// --- 3 ---------------------------------------------------------------------

Verdict cc_isomorphism() {
  Run& run = run_of("cc_tree5");
  std::vector<const Adversary*> adv;
  for (std::size_t k = 0; k < run.adversary_count(); ++k) adv.push_back(&run.adversary(k));
  const Report r = isomorphism_suite(run.trace(), adv, run.config().horizon, 20, run.config().true_path);
  if (!r.ok()) return {false, r.str()};
  std::ostringstream note;
  note << "horizon " << run.config().horizon << ", M-node infinite outcomes:";
  for (std::size_t k = 0; k < adv.size(); ++k) {
    note << ' ' << infinite_stages(run.trace(), node_of_type(run, "M" + std::to_string(k))).size();
  }
  return {true, note.str()};
}

// --- 4 ---------------------------------------------------------------------

Verdict defective_copy() {
  Run& run = run_of("cc_defective");
  const Nat horizon = run.config().horizon;
  const NodeId m = node_of_type(run, "M0");
  const auto inf = infinite_stages(run.trace(), m);
  const Nat last = inf.empty() ? 0 : inf.back();
  if (last >= horizon / 2) return {false, "last infinite outcome at " + std::to_string(last)};
  std::set<Outcome> after;
  for (const auto& [stage, o] : run.nodes()[m].history) {
    if (stage > last) after.insert(o);
  }
  if (after.size() != 1 || after.begin()->infinite()) {
    return {false, std::to_string(after.size()) + " distinct outcomes after " + std::to_string(last)};
  }
  return {true, "last infinite outcome at stage " + std::to_string(last) + ", then constant " +
                    format_outcome(*after.begin())};
}

// --- 5 ---------------------------------------------------------------------

Verdict invariants_everywhere() {
  std::size_t traces = 0;
  for (const char* name : {"cc_tree5", "cc_defective", "dc_modulus", "dc_diagonal", "dc_with_m"}) {
    const Report r = check_trace_invariants(run_of(name).trace());
    if (!r.ok()) return {false, std::string(name) + ": " + r.str()};
    ++traces;
  }
  return {true, std::to_string(traces) + " traces, zero failures"};
}

// --- 6 ---------------------------------------------------------------------

Verdict labeling() {
  Run& run = run_of("cc_tree5");
  std::set<NatString> chosen;
  for (const auto& [in, s] : compute_Q(run.trace(), 150, run.config().true_path).phi) chosen.insert(s);
  const Report r = check_labeling(run.trace(), chosen, 150, 300);
  if (!r.ok()) return {false, r.str()};
  return {true, std::to_string(chosen.size()) + " Q strings grow, unchosen strings stable between 150 and 300"};
}

// --- 7 ---------------------------------------------------------------------

Verdict dc_modulus() {
  Run& run = run_of("dc_modulus");
  const Report r = modulus_suite(run.trace(), PhiPredicate(run.config().phi), run.config().horizon,
                                 run.config().true_path);
  if (!r.ok()) return {false, r.str()};
  return {true, "every checked triple i<j<n holds at horizon " + std::to_string(run.config().horizon)};
}

// --- 8 ---------------------------------------------------------------------

Verdict dc_diagonalization() {
  Run& run = run_of("dc_diagonal");
  const auto reports = check_diagonalization(run.trace(), run.config().functionals,
                                             run.config().horizon, run.config().true_path);
  for (const auto& r : reports) {
    if (!r.active) continue;
    if (!r.frozen) return {false, "U " + std::to_string(r.node) + " never froze"};
    if (!r.witness_enumerated) return {false, "witness " + std::to_string(r.witness) + " not enumerated"};
    if (r.output != std::optional<Nat>(0)) return {false, "Phi_e did not halt with 0"};
    return {true, "U froze at stage " + std::to_string(*r.frozen_at) + ", witness " +
                      std::to_string(r.witness) + " enumerated, output 0"};
  }
  return {false, "no active U on the true path"};
}

// --- 9 ---------------------------------------------------------------------

Verdict replay() {
  std::size_t bytes = 0;
  for (const char* name : {"cc_tree5", "dc_diagonal"}) {
    Run again(load_run_config(config_path(name)));
    again.execute();
    const std::string a = run_of(name).trace().str(), b = again.trace().str();
    if (a != b) return {false, std::string(name) + " differs"};
    if (Trace::parse(a).str() != a) return {false, std::string(name) + " does not reparse"};
    bytes += a.size();
  }
  return {true, std::to_string(bytes) + " bytes reproduced"};
}

// --- 10 --------------------------------------------------------------------

Verdict dimension_two() {
  Run& run = run_of("cc_tree5");
  const StructureSnapshot snap = run.snapshot();
  std::vector<StringKey> keys;
  for (const auto& s : replay_window(run.trace()).range(4)) keys.push_back({s, Sort::none});
  const Nat support = 3;
  const DimensionTwo d = extend_to_dimension_two(snap, keys, support);
  if (d.reduct_of_b0 != d.reduct_of_b1 || d.reduct_of_b0 != d.reduct) return {false, "reducts differ"};
  if (d.b0 == d.b1) return {false, "expansions coincide"};
  const Materialized m = materialize(snap, keys, support);
  std::set<std::string> want, got;
  for (const auto& [e, n] : m.index) {
    if (e.string.empty()) {
      want.insert(std::string("P ") + (e.vertex.size() % 2 == 0 ? "a_even " : "a_odd ") + std::to_string(n));
    }
  }
  std::istringstream in(d.reduct);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("P a_", 0) == 0) got.insert(line);
  }
  if (got != want) return {false, "parity facts wrong"};
  return {true, std::to_string(keys.size()) + " keys, " + std::to_string(got.size()) + " parity facts"};
}

}  // namespace

int main() {
  criterion(1, 10, cube_automorphisms);
  criterion(2, 10, branch_round_trip);
  criterion(3, 60, cc_isomorphism);
  criterion(4, 60, defective_copy);
  criterion(5, 120, invariants_everywhere);
  criterion(6, 60, labeling);
  criterion(7, 120, dc_modulus);
  criterion(8, 120, dc_diagonalization);
  criterion(9, 60, replay);
  criterion(10, 60, dimension_two);
  return g_failed == 0 ? 0 : 1;
}
