#include "branch_fixture.hpp"
#include "cubecode/adversary.hpp"
#include "cubecode/cc_construction.hpp"
#include "cubecode/error.hpp"
#include "cubecode/verify.hpp"
#include "doctest.h"

using namespace cubecode;
using branch_fixture::make_test_tree;

TEST_CASE("report text") {
  Report r;
  r.pass("a");
  r.fail("b", "node 3");
  r.fail("b", "node 4");
  r.pass("b");
  CHECK_FALSE(r.ok());
  CHECK(r.find("b")->failures == 2);
  CHECK(r.str() == "PASS a\nFAIL b @ node 3 (2 failures)\n");
  CHECK(Report{}.ok());
  CHECK(Report{}.str().empty());
}

TEST_CASE("branches to an automorphism and back") {
  const auto t = make_test_tree(3, {1}, FinSet{0, 2});
  std::set<NatString> inner;
  for (const auto& s : t.tree) {
    if (s.size() < t.depth) inner.insert(s);
  }
  CHECK(labeled_tree(t.snapshot(), t.keys, t.support) == inner);
  const ElementMap g = automorphism_from_paths(t.paths, t.F, t.sigma, t.tree);
  CHECK(g({FinSet{}, t.sigma, Sort::none}) == CubeElem{t.F, t.sigma, Sort::none});
  const IsoCheck iso = check_automorphism(g, t.snapshot(), t.keys, t.support);
  CHECK_MESSAGE(iso.ok, iso.failure);
  const NatString& h0 = t.paths.branches.at(0);
  const NatString back = path_from_automorphism(g, t.sigma, 11);
  CHECK(back == NatString(h0.begin(), h0.begin() + 11));
  CHECK_THROWS_AS(g({FinSet{}, h0, Sort::none}), Error);  // the tip

  for (Nat i = 0; i < 3; ++i) {
    bool reach = false;
    for (const auto& s : t.tree) reach |= s.size() == 12 && is_prefix(extend(t.sigma, i), s);
    CHECK(orbit_probe(t.sigma, i, t.tree, 12) == reach);
  }
}

TEST_CASE("branch round trip negative controls") {
  auto t = make_test_tree(5, {}, FinSet{1});
  // a branch leaving the tree
  PathFamily off = t.paths;
  off.branches[1].push_back(2);
  off.branches[1].push_back(2);
  off.branches[1][off.branches[1].size() - 2] = 7;
  CHECK_THROWS_AS(automorphism_from_paths(off, t.F, t.sigma, t.tree), Error);
  CHECK_THROWS_AS(automorphism_from_paths(t.paths, FinSet{0}, t.sigma, t.tree), Error);

  // damage one vertex on the branch: the automorphism check must notice
  const NatString mid(t.paths.branches[1].begin(), t.paths.branches[1].begin() + 5);
  t.store->declare(9, {FinSet{0}, mid, Sort::none}, 1);
  const ElementMap g = automorphism_from_paths(t.paths, t.F, t.sigma, t.tree);
  CHECK_FALSE(check_automorphism(g, t.snapshot(), t.keys, t.support).ok);

  // a map that fixes everything cannot produce a path
  const ElementMap id = [](const CubeElem& e) { return e; };
  CHECK_THROWS_AS(path_from_automorphism(id, t.sigma, 6), Error);
  // one that only moves the start
  const ElementMap once = [&](const CubeElem& e) {
    return e.string == t.sigma ? CubeElem{symm_diff(e.vertex, FinSet{1}), e.string, e.sort} : e;
  };
  CHECK_THROWS_AS(path_from_automorphism(once, t.sigma, 6), Error);
}

TEST_CASE("isomorphism check catches a swap") {
  const auto t = make_test_tree(9, {0}, FinSet{1});
  const Materialized m = materialize(t.snapshot(), t.keys, t.support);
  std::map<CubeElem, Nat> g = m.index;
  CHECK(check_isomorphism(g, t.snapshot(), m.stream, 1).ok);

  // swap two vertices of one cube
  const CubeElem a{FinSet{}, {0}, Sort::none}, b{FinSet{0, 1}, {0}, Sort::none};
  std::swap(g[a], g[b]);
  const IsoCheck bad = check_isomorphism(g, t.snapshot(), m.stream, 1);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.failure.empty());

  // a non-injective map
  std::map<CubeElem, Nat> dup = m.index;
  dup[b] = dup[a];
  CHECK_FALSE(check_isomorphism(dup, t.snapshot(), m.stream, 1).ok);
}

TEST_CASE("label delay accounting") {
  auto store = std::make_shared<LabelStore>();
  const CubeElem a{FinSet{}, {}, Sort::none};
  store->declare(0, a, 2);
  store->declare(1, a, 5);
  FactStream target;
  target.add({Rel::W, {{}, Sort::none}, 0, 0, 0, 1});
  target.add({Rel::S, {}, 0, 0, 0, 2});
  const StructureSnapshot snap{Variant::cc, store, 10};
  // S1 stamped 5 is due at 5 + lag
  CHECK(check_isomorphism({{a, 0}}, snap, target, 6, 2).ok);
  CHECK_FALSE(check_isomorphism({{a, 0}}, snap, target, 7, 2).ok);
  target.add({Rel::S, {}, 1, 0, 0, 7});
  CHECK(check_isomorphism({{a, 0}}, snap, target, 7, 2).ok);
  // a target label the source never had
  target.add({Rel::S, {}, 4, 0, 0, 3});
  CHECK_FALSE(check_isomorphism({{a, 0}}, snap, target, 7, 2).ok);
}

TEST_CASE("back and forth") {
  auto store = std::make_shared<LabelStore>();
  for (Nat s : {0u, 1u}) {
    store->declare(0, {FinSet{}, {s}, Sort::none}, 1);
    store->declare(1, {FinSet{}, {s}, Sort::none}, 1);
  }
  store->declare(0, {FinSet{}, {2}, Sort::none}, 1);
  const StructureSnapshot snap{Variant::cc, store, 1};
  const std::vector<StringKey> keys{{{0}, Sort::none}, {{1}, Sort::none}, {{2}, Sort::none}};
  const CubeElem x0{FinSet{}, {0}, Sort::none}, x1{FinSet{}, {1}, Sort::none},
      y0{FinSet{1}, {0}, Sort::none};
  // W differs at once: different strings
  CHECK_FALSE(bf_equiv({x0}, {x1}, 0, snap, keys, 2).equivalent);
  CHECK(bf_equiv({x0}, {x0}, 2, snap, keys, 2).equivalent);
  CHECK(bf_equiv({x0, y0}, {x0, y0}, 1, snap, keys, 2).equivalent);
  // same string, different labels
  CHECK_FALSE(bf_equiv({x0}, {y0}, 0, snap, keys, 2).equivalent);
}

TEST_CASE("trace invariants on a clean and a corrupted trace") {
  std::vector<std::unique_ptr<Adversary>> adv;
  adv.push_back(make_faithful_copy("id", Permutation::identity(), 0, 3));
  Trace trace;
  CcConstruction cc(CcConfig{{{}, {0}, {1}}, {}, {}}, std::move(adv), trace);
  Engine engine(cc, trace);
  engine.run(60);
  CHECK(check_trace_invariants(trace).ok());

  // a second choice of an already chosen string
  Trace twice = Trace::parse(trace.str());
  const Event* first_c = nullptr;
  for (const auto& e : twice.events()) {
    if (e.tag == "C") {
      first_c = &e;
      break;
    }
  }
  REQUIRE(first_c != nullptr);
  Event again = *first_c;
  again.stage = 59;
  again.fields[0] = "1";
  twice.mutable_events().push_back(again);
  const Report r1 = check_trace_invariants(twice);
  CHECK_FALSE(r1.ok());
  REQUIRE(r1.find("choose-once") != nullptr);
  CHECK_FALSE(r1.find("choose-once")->ok);
  CHECK_FALSE(r1.find("choose-once")->locus.empty());

  // drop every S0 declaration of G
  Trace silent = Trace::parse(trace.str());
  auto& ev = silent.mutable_events();
  ev.erase(std::remove_if(ev.begin(), ev.end(), [](const Event& e) { return e.tag == "D"; }), ev.end());
  const Report r2 = check_trace_invariants(silent);
  CHECK_FALSE(r2.find("g-coverage")->ok);
}
