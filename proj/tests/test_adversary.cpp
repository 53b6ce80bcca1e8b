#include <set>

#include "cubecode/adversary.hpp"
#include "cubecode/error.hpp"
#include "doctest.h"

using namespace cubecode;

namespace {

// A small cc structure: window strings inside 4^{<4}, a few grows.
struct Fixture {
  WindowParams params{3, 2, 2};
  StringWindow window{params};
  LabelStore store;

  Fixture() {
    window.add_chosen({});
    window.add_chosen({0});
    store.grow({{}, Sort::none}, 1);
    store.grow({{0}, Sort::none}, 2);
    store.grow({{}, Sort::none}, 3);
    store.declare(5, {FinSet{1}, {1}, Sort::none}, 3);
  }

  std::vector<CubeElem> universe(Nat stage) const {
    std::vector<CubeElem> out;
    for (const auto& s : window.range(stage)) {
      for (std::uint64_t m = 0; m < (1U << params.support); ++m) {
        out.push_back({FinSet::from_mask(m), s, Sort::none});
      }
    }
    return out;
  }
};

}  // namespace

TEST_CASE("fact stream bookkeeping") {
  FactStream fs;
  fs.add({Rel::W, {{2}, Sort::none}, 0, 7, 0, 4});
  fs.add({Rel::W, {{2}, Sort::none}, 0, 7, 0, 9});  // later duplicate ignored
  fs.add({Rel::W, {{2}, Sort::none}, 0, 3, 0, 4});
  fs.add({Rel::S, {}, 1, 7, 0, 6});
  fs.add({Rel::E, {}, 0, 7, 3, 5});
  CHECK(fs.size() == 4);
  CHECK(fs.holds_within({Rel::W, {{2}, Sort::none}, 0, 7, 0, 0}, 4));
  CHECK_FALSE(fs.holds_within({Rel::S, {}, 1, 7, 0, 0}, 5));
  CHECK(fs.holds_within({Rel::S, {}, 1, 7, 0, 0}, 6));
  CHECK(fs.age(7) == 4u);
  CHECK_FALSE(fs.age(8).has_value());

  // 3 and 7 are equally old, the smaller wins
  const Atom w{Rel::W, {{2}, Sort::none}, 0, 0, true};
  CHECK(fs.oldest_satisfying({w}, 10) == 3u);
  const Atom s1{Rel::S, {}, 1, 0, true};
  CHECK(fs.oldest_satisfying({w, s1}, 10) == 7u);
  CHECK_FALSE(fs.oldest_satisfying({w, s1}, 5).has_value());
  CHECK(fs.e_neighbor(0, 7, 5) == 3u);
  CHECK_FALSE(fs.e_neighbor(0, 7, 4).has_value());

  const FactStream back = FactStream::parse(fs.dump());
  CHECK(back.dump() == fs.dump());
  CHECK_THROWS_AS(FactStream::parse("1 Q 2 3\n"), Error);
}

TEST_CASE("block shuffles are bijections that stay inside their block") {
  const Permutation p = Permutation::block_shuffle(11, 8);
  std::set<Nat> image;
  for (Nat x = 0; x < 64; ++x) {
    const Nat y = p.apply(x);
    CHECK(y / 8 == x / 8);
    CHECK(p.invert(y) == x);
    image.insert(y);
  }
  CHECK(image.size() == 64);
  const Permutation again = Permutation::block_shuffle(11, 8);
  for (Nat x = 0; x < 64; ++x) CHECK(again.apply(x) == p.apply(x));
  Nat moved = 0;
  for (Nat x = 0; x < 64; ++x) moved += p.apply(x) != x;
  CHECK(moved > 0);
  CHECK(Permutation::identity().apply(41) == 41);
}

TEST_CASE("a faithful mirror is isomorphic to the built structure") {
  Fixture fx;
  auto m = make_faithful_copy("m", Permutation::block_shuffle(5, 4), 0, fx.params.support);
  for (Nat s = 1; s <= 4; ++s) m->sync(fx.store, fx.window, Variant::cc, s);
  const FactStream& fs = m->stream();
  const auto univ = fx.universe(4);

  std::map<CubeElem, Nat> h;
  std::set<Nat> seen;
  for (const auto& e : univ) {
    auto x = m->id_of(e);
    REQUIRE(x.has_value());
    REQUIRE(m->ground(*x) == std::optional<ElementId>(e));
    CHECK(seen.insert(*x).second);
    h[e] = *x;
  }
  for (const auto& a : univ) {
    CHECK(fs.w_key(h[a], kEndOfTime) == std::optional<StringKey>(a.key()));
    for (const auto& b : univ) {
      for (Nat i = 0; i < fx.params.support; ++i) {
        CHECK(fs.holds_within({Rel::E, {}, i, h[a], h[b], 0}, kEndOfTime) == holds_E(i, a, b));
      }
      CHECK(fs.holds_within({Rel::P, {}, 0, h[a], h[b], 0}, kEndOfTime) == holds_P(a, b));
    }
    std::vector<Nat> want = fx.store.labels(a);
    CHECK(fs.labels(h[a], kEndOfTime) == want);
  }
}

TEST_CASE("mirror delay holds facts back") {
  Fixture fx;
  auto m = make_faithful_copy("late", Permutation::identity(), 3, fx.params.support);
  for (Nat s = 1; s <= 4; ++s) m->sync(fx.store, fx.window, Variant::cc, s);
  const CubeElem e{FinSet{1}, {1}, Sort::none};
  const Nat x = *m->id_of(e);
  // S_5 was declared at stage 3
  CHECK_FALSE(m->stream().holds_within({Rel::S, {}, 5, x, 0, 0}, 5));
  CHECK(m->stream().holds_within({Rel::S, {}, 5, x, 0, 0}, 6));
  CHECK(m->delay() == 3);
}

TEST_CASE("defects") {
  Fixture fx;
  const StringKey k1{{1}, Sort::none};
  auto omit = make_defective_copy("omit", Permutation::identity(), 0,
                                  {{Defect::Kind::omit_label, 5, k1, 0, 0}}, fx.params.support);
  auto brk = make_defective_copy("brk", Permutation::identity(), 0,
                                 {{Defect::Kind::break_p, 0, {{}, Sort::none}, 0, 0}},
                                 fx.params.support);
  auto frz = make_defective_copy("frz", Permutation::identity(), 0,
                                 {{Defect::Kind::freeze_after, 0, {}, 0, 2}}, fx.params.support);
  for (Nat s = 1; s <= 4; ++s) {
    omit->sync(fx.store, fx.window, Variant::cc, s);
    brk->sync(fx.store, fx.window, Variant::cc, s);
    frz->sync(fx.store, fx.window, Variant::cc, s);
  }
  CHECK_FALSE(omit->faithful());

  const CubeElem e{FinSet{1}, {1}, Sort::none};
  CHECK_FALSE(omit->stream().holds_within({Rel::S, {}, 5, *omit->id_of(e), 0, 0}, kEndOfTime));

  const CubeElem root{FinSet{}, {}, Sort::none}, c0{FinSet{}, {0}, Sort::none},
      c1{FinSet{}, {1}, Sort::none};
  CHECK_FALSE(brk->stream().holds_within({Rel::P, {}, 0, *brk->id_of(root), *brk->id_of(c0), 0},
                                         kEndOfTime));
  CHECK(brk->stream().holds_within({Rel::P, {}, 0, *brk->id_of(root), *brk->id_of(c1), 0},
                                   kEndOfTime));

  for (const auto& f : frz->stream().facts()) CHECK(f.step <= 2);
  CHECK(frz->stream().size() < omit->stream().size());
}

TEST_CASE("mirrors in the two-sorted variant start with u0, u1") {
  WindowParams params{2, 2, 2};
  StringWindow window(params);
  window.add_chosen({});
  LabelStore store;
  store.grow({{}, Sort::zero}, 1);
  store.grow({{}, Sort::one}, 1);
  auto m = make_faithful_copy("m", Permutation::identity(), 0, 2);
  m->sync(store, window, Variant::dc, 2);
  CHECK(m->ground(0) == std::optional<ElementId>(UElem{0}));
  CHECK(m->ground(1) == std::optional<ElementId>(UElem{1}));
  for (std::uint64_t mask = 0; mask < 4; ++mask) {
    const CubeElem a{FinSet::from_mask(mask), {}, Sort::zero};
    for (Nat k = 0; k < 2; ++k) {
      CHECK(m->stream().holds_within({Rel::P, {}, 0, k, *m->id_of(a), 0}, kEndOfTime) ==
            holds_P(UElem{k}, a));
    }
  }
}

TEST_CASE("materialize mirrors the snapshot") {
  Fixture fx;
  auto store = std::make_shared<const LabelStore>(fx.store);
  const StructureSnapshot snap{Variant::cc, store, 4};
  const std::vector<StringKey> keys{{{}, Sort::none}, {{0}, Sort::none}, {{1}, Sort::none}};
  const Materialized mat = materialize(snap, keys, 2);
  CHECK(mat.index.size() == 12);
  for (const auto& [a, x] : mat.index) {
    CHECK(std::get<CubeElem>(mat.element.at(x)) == a);
    CHECK(mat.stream.labels(x, kEndOfTime) == snap.labels(a));
    for (const auto& [b, y] : mat.index) {
      CHECK(mat.stream.holds_within({Rel::P, {}, 0, x, y, 0}, kEndOfTime) == holds_P(a, b));
    }
  }
}
