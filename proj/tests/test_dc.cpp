#include "cubecode/dc_construction.hpp"
#include "cubecode/error.hpp"
#include "cubecode/replay.hpp"
#include "doctest.h"

using namespace cubecode;

namespace {

std::vector<PhiRow> until_rows(Nat count) {
  std::vector<PhiRow> rows;
  for (Nat n = 0; n < count; ++n) rows.push_back({PhiRow::Kind::until, 20 + 7 * n});
  return rows;
}

struct DcRun {
  Trace trace;
  std::unique_ptr<DcConstruction> dc;
  std::unique_ptr<Engine> engine;

  explicit DcRun(DcConfig cfg, Nat horizon) {
    dc = std::make_unique<DcConstruction>(std::move(cfg), std::vector<std::unique_ptr<Adversary>>{},
                                          trace);
    engine = std::make_unique<Engine>(*dc, trace);
    engine->run(horizon);
  }
};

DcConfig modulus_config() {
  DcConfig cfg;
  cfg.shape = {1, 10, 0, 0, 0};
  cfg.phi = PhiPredicate(until_rows(10));
  return cfg;
}

}  // namespace

TEST_CASE("phi rows") {
  const PhiRow u = parse_phi_row("until:5");
  for (Nat s = 0; s < 20; ++s) CHECK(u.holds(s) == (s < 5));
  CHECK_FALSE(u.in_Z());
  const PhiRow p = parse_phi_row("periodic:3");
  Nat trues = 0;
  for (Nat s = 0; s < 30; ++s) trues += p.holds(s);
  CHECK(trues == 10);
  CHECK(p.in_Z());
  CHECK_FALSE(p.s0().has_value());
  const PhiRow never = parse_phi_row("never");
  for (Nat s = 0; s < 20; ++s) CHECK_FALSE(never.holds(s));
  for (const char* t : {"until:12", "periodic:3", "never"}) CHECK(format_phi_row(parse_phi_row(t)) == t);
  CHECK_THROWS_AS(parse_phi_row("sometimes"), Error);
  CHECK_THROWS_AS(parse_phi_row("periodic:0"), Error);

  const PhiPredicate phi({u, p});
  CHECK(phi.holds(0, 4));
  CHECK_FALSE(phi.holds(5, 0));  // beyond the declared rows
  CHECK_THROWS_AS(phi.row(2), Error);
}

TEST_CASE("functionals") {
  // join of <1,2> and <3,4>: positions 0..3 read 1, 3, 2, 4
  const std::vector<NatString> oracle{{1, 2}, {3, 4}};
  CHECK(Functional{Functional::Kind::bit_probe, 1}.run(oracle, 0, 100) == 1u);
  CHECK(Functional{Functional::Kind::bit_probe, 2}.run(oracle, 0, 100) == 0u);
  CHECK(Functional{Functional::Kind::bit_probe, 3}.run(oracle, 0, 100) == 0u);
  CHECK_FALSE(Functional{Functional::Kind::bit_probe, 4}.run(oracle, 0, 100).has_value());
  CHECK_FALSE(Functional{Functional::Kind::bit_probe, 1}.run(oracle, 0, 1).has_value());

  const Functional lt{Functional::Kind::length_threshold, 2};
  CHECK(lt.run(oracle, 7, 10) == 0u);
  CHECK_FALSE(lt.run({{1, 2}, {3}}, 7, 10).has_value());
  CHECK_FALSE(lt.run(oracle, 7, 1).has_value());
  CHECK(Functional{}.run({}, 0, 1) == 0u);

  for (const char* t : {"constant0", "length_threshold:3", "bit_probe:5"}) {
    CHECK(format_functional(parse_functional(t)) == t);
  }
  CHECK_THROWS_AS(parse_functional("oracle:2"), Error);
}

TEST_CASE("halting simulation") {
  HaltingSim h(500);
  CHECK(h.reserve() == 500);
  CHECK(h.reserve() == 501);
  h.enumerate(501, 40);
  CHECK(h.contains(501));
  CHECK_FALSE(h.contains(501, 39));
  CHECK(h.contains(501, 40));
  CHECK_FALSE(h.contains(500));
  CHECK(h.entered_at(501) == 40u);
  CHECK(h.dump() == "501 40\n");
}

TEST_CASE("dc orderings") {
  const DcShape shape{2, 3, 2, 1, 1};
  const auto ord = default_dc_ordering(shape);
  CHECK_NOTHROW(validate_dc_ordering(ord));
  // 2 mothers per a, 2 * 3 daughters per a, 2 U, 1 M
  CHECK(ord.size() == 4 + 12 + 2 + 1);
  using R = Requirement;
  CHECK_THROWS_AS(validate_dc_ordering({R::daughter(0, 1, 0), R::mother(0, 0)}), Error);
  CHECK_THROWS_AS(validate_dc_ordering({R::mother(0, 0), R::daughter(0, 2, 0)}), Error);
  CHECK_THROWS_AS(validate_dc_ordering({R::mother(0, 0), R::n_string({})}), Error);
}

TEST_CASE("phi never true: daughters only take finite outcomes") {
  DcConfig cfg;
  cfg.shape = {1, 4, 0, 0, 0};
  cfg.phi = PhiPredicate(std::vector<PhiRow>(6, PhiRow{PhiRow::Kind::never, 0}));
  DcRun run(std::move(cfg), 80);
  const TraceIndex index(run.trace);
  std::size_t daughter_visits = 0;
  for (NodeId id = 0; id < index.nodes().size(); ++id) {
    const auto& node = index.nodes()[id];
    const Requirement req = parse_requirement(node.type);
    if (req.kind != Requirement::Kind::daughter) continue;
    for (const auto& [stage, o] : node.history) {
      CHECK(o == Outcome::finite(0));
      ++daughter_visits;
    }
  }
  CHECK(daughter_visits > 0);
}

TEST_CASE("modulus against a hand computed bound") {
  const Nat horizon = 400;
  DcRun run(modulus_config(), horizon);
  const ExtractedPaths paths = extract_paths(run.trace, horizon);
  const auto rows = until_rows(10);
  Nat checked = 0;
  for (const auto& fp : paths.paths) {
    if (fp.a != 0) continue;
    for (const auto& gp : paths.paths) {
      if (gp.a != 1 || !(fp.v < gp.v)) continue;
      for (Nat n = gp.v + 1; n < 10; ++n) {
        if (fp.prefix.size() <= n || gp.prefix.size() <= n) continue;
        // until:s0 is last true at s0 - 1
        const bool want = rows[n].value - 1 <= fp.prefix[n] + gp.prefix[n];
        const ModulusVerdict v = modulus_check(fp.v, gp.v, n, paths, PhiPredicate(rows), horizon);
        CHECK(v.checked);
        CHECK(v.ok == want);
        CHECK(want);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);

  // negative control: a phi whose rows stay true far beyond the paths
  std::vector<PhiRow> late(10, PhiRow{PhiRow::Kind::until, horizon});
  bool any_false = false;
  for (const auto& fp : paths.paths) {
    for (const auto& gp : paths.paths) {
      if (fp.a != 0 || gp.a != 1 || !(fp.v < gp.v)) continue;
      for (Nat n = gp.v + 1; n < 10; ++n) {
        if (fp.prefix.size() <= n || gp.prefix.size() <= n) continue;
        any_false |= !modulus_check(fp.v, gp.v, n, paths, PhiPredicate(late), horizon).ok;
      }
    }
  }
  CHECK(any_false);
  CHECK_THROWS_AS(modulus_check(3, 2, 5, paths, PhiPredicate(rows), horizon), Error);
}

TEST_CASE("extracted paths only grow") {
  DcRun run(modulus_config(), 400);
  const ExtractedPaths early = extract_paths(run.trace, 250);
  const ExtractedPaths late = extract_paths(run.trace, 400);
  for (const auto& p : early.paths) {
    const PathPrefix* q = p.a == 0 ? late.f(p.v) : late.g(p.v);
    REQUIRE(q != nullptr);
    CHECK(is_prefix(p.prefix, q->prefix));
  }
  CHECK_FALSE(early.paths.empty());
}

TEST_CASE("final structure constants") {
  DcRun run(modulus_config(), 10);
  const StructureSnapshot snap{Variant::dc, run.dc->shared_store(), 10};
  const FinalStructure fin = assemble_final_structure(snap);
  CHECK(fin.c == ElementId{UElem{0}});
  CHECK(fin.d == ElementId{CubeElem{FinSet{}, {}, Sort::one}});
  CHECK(fin.v(FinSet{2}) == CubeElem{FinSet{2}, {}, Sort::one});
  CHECK_THROWS_AS(assemble_final_structure({Variant::cc, run.dc->shared_store(), 10}), Error);
  CHECK(replay_store(run.trace).dump() == run.dc->store().dump());
}
