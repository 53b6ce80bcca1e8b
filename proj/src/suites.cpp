#include "cubecode/suites.hpp"

#include <memory>

#include "cubecode/cc_construction.hpp"
#include "cubecode/dc_construction.hpp"
#include "cubecode/error.hpp"
#include "cubecode/replay.hpp"

namespace cubecode {

Nat trace_horizon(const Trace& trace) {
  return trace.events().empty() ? 0 : trace.events().back().stage;
}

std::vector<Nat> infinite_stages(const Trace& trace, NodeId node) {
  const std::string id = std::to_string(node);
  std::vector<Nat> out;
  for (const auto& ev : trace.events()) {
    if (ev.tag != "V" || ev.fields.size() < 2 || ev.fields[0] != id) continue;
    const auto& o = ev.fields[1];
    if (o == "inf" || (!o.empty() && o[0] == 'i')) out.push_back(ev.stage);
  }
  return out;
}

Report modulus_suite(const Trace& trace, const PhiPredicate& phi, Nat horizon,
                     TruePathParams params) {
  Report report;
  const ExtractedPaths paths = extract_paths(trace, horizon, params);
  std::size_t checked = 0;
  for (Nat j = 1; j < phi.range(); ++j) {
    if (!paths.g(j)) continue;
    for (Nat i = 0; i < j; ++i) {
      if (!paths.f(i)) continue;
      for (Nat n = j + 1; n < phi.range(); ++n) {
        ModulusVerdict v;
        try {
          v = modulus_check(i, j, n, paths, phi, horizon);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::out_of_range) continue;
          throw;
        }
        if (!v.checked) continue;
        ++checked;
        if (!v.ok) {
          report.fail("modulus", std::to_string(i) + "," + std::to_string(j) + "," +
                                     std::to_string(n) + " " + v.detail);
        }
      }
    }
  }
  if (checked == 0) report.fail("modulus", "no triple checked");
  report.pass("modulus");
  return report;
}

Report diagonalization_suite(const Trace& trace, const std::vector<Functional>& functionals,
                             Nat horizon, TruePathParams params) {
  Report report;
  for (const auto& r : check_diagonalization(trace, functionals, horizon, params)) {
    if (!r.consistent) {
      report.fail("diagonalization", "node " + std::to_string(r.node) + " e=" +
                                         std::to_string(r.e) + " x=" + std::to_string(r.witness));
    }
  }
  report.pass("diagonalization");
  return report;
}

Report isomorphism_suite(const Trace& trace, const std::vector<const Adversary*>& adversaries,
                         Nat horizon, Nat min_infinite, TruePathParams params) {
  Report report;
  report.pass("isomorphism");
  const TraceIndex index(trace);
  const auto tpa = true_path_approx(index.nodes(), horizon, params);
  auto source_store = std::make_shared<const LabelStore>(replay_store(trace, horizon));
  const StructureSnapshot source{read_trace_config(trace).variant, source_store, horizon};
  const StringWindow window = replay_window(trace, horizon);

  for (std::size_t k = 0; k < adversaries.size(); ++k) {
    const std::string type = "M" + std::to_string(k);
    const std::string tag = type + " ";
    const PathStep* step = nullptr;
    for (const auto& st : tpa) {
      if (st.type == type) step = &st;
    }
    if (!step) {
      report.fail("isomorphism", tag + "not on the true path");
      continue;
    }
    const auto inf = infinite_stages(trace, step->node);
    if (inf.size() < min_infinite) {
      report.fail("isomorphism", tag + "only " + std::to_string(inf.size()) + " infinite stages");
      continue;
    }
    const Adversary& adv = *adversaries[k];
    const Extraction ex = extract_isomorphism(trace, step->node, adv, horizon);
    const Nat t_prev = inf[inf.size() - 2];
    const auto settled = window.range(t_prev > adv.delay() ? t_prev - adv.delay() : 0);
    for (const auto& e : ex.stalled) {
      bool late = true;
      for (const auto& s : settled) {
        if (s == e.string) late = false;
      }
      if (!late) report.fail("isomorphism", tag + "stalled at " + format_elem(e));
    }
    const IsoCheck iso = check_isomorphism(ex.g, source, adv.stream(), horizon, adv.delay());
    if (!iso.ok) report.fail("isomorphism", tag + iso.failure);
  }
  return report;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"invariants", "labeling", "modulus",
                                              "diagonalization", "isomorphism"};
  return names;
}

}  // namespace cubecode
