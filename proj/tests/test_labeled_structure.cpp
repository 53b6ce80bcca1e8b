#include "cubecode/error.hpp"
#include "cubecode/labeled_structure.hpp"
#include "doctest.h"

using namespace cubecode;

namespace {
CubeElem at(FinSet f, NatString s, Sort sort = Sort::none) { return {std::move(f), std::move(s), sort}; }
}  // namespace

TEST_CASE("text forms round trip") {
  CHECK(format_string({}) == "<>");
  CHECK(format_string({1, 5, 2}) == "<1,5,2>");
  CHECK(parse_string("<1,5,2>") == NatString{1, 5, 2});
  auto e = at({0, 2}, {3}, Sort::one);
  CHECK(format_elem(e) == "{0,2}@<3>#1");
  CHECK(parse_elem("{0,2}@<3>#1") == e);
  CHECK(parse_key("<>#0") == StringKey{{}, Sort::zero});
  CHECK_THROWS_AS(parse_elem("{0@<>"), Error);
}

TEST_CASE("W, E and P") {
  CHECK(holds_W({1}, Sort::none, at({}, {1})));
  CHECK_FALSE(holds_W({1}, Sort::none, at({}, {1, 2})));
  CHECK_FALSE(holds_W({}, Sort::zero, at({}, {}, Sort::one)));
  CHECK(holds_W({}, Sort::one, at({}, {}, Sort::one)));
  CHECK_THROWS_AS(holds_W({}, Sort::none, at({}, {}, Sort::zero)), Error);
  CHECK_FALSE(holds_W({}, Sort::zero, UElem{0}));

  CHECK(holds_E(2, at({}, {4}), at({2}, {4})));
  CHECK_FALSE(holds_E(2, at({}, {4}), at({2}, {5})));

  CHECK(holds_P(at({}, {7}), at({}, {7, 3})));
  CHECK_FALSE(holds_P(at({3}, {7}), at({}, {7, 3})));
  CHECK(holds_P(at({3}, {7}), at({1}, {7, 3})));
  CHECK_FALSE(holds_P(at({}, {7}), at({}, {7, 3}, Sort::zero)));
  CHECK(holds_P(UElem{0}, at({}, {}, Sort::zero)));
  CHECK_FALSE(holds_P(UElem{1}, at({}, {}, Sort::zero)));
  CHECK(holds_P(UElem{1}, at({4}, {}, Sort::zero)));
  CHECK_FALSE(holds_P(UElem{0}, at({}, {}, Sort::one)));
}

TEST_CASE("declarations and duplicates") {
  LabelStore store;
  auto y = at({}, {2});
  CHECK(store.declare(0, y, 5));
  CHECK_FALSE(store.declare(0, y, 9));
  CHECK(store.stamp(0, y) == 5u);
  CHECK(store.declarations().size() == 1);
  CHECK(store.declare(1, y, 6));
  CHECK(store.dump() == "5 0 {}@<2>\n6 1 {}@<2>\n");
}

TEST_CASE("grow traced by hand") {
  LabelStore store;
  StringKey key{{4}, Sort::none};
  store.grow(key, 3);
  CHECK(store.labels(empty_at(key)) == std::vector<Nat>{0});
  CHECK(store.labels(at({0}, {4})).empty());
  store.grow(key, 4);
  CHECK(store.labels(empty_at(key)) == std::vector<Nat>{0, 1});
  CHECK(store.labels(at({0}, {4})).empty());
  store.grow(key, 6);
  CHECK(store.labels(empty_at(key)) == std::vector<Nat>{0, 1, 2});
  CHECK(store.labels(at({0, 5}, {4})) == std::vector<Nat>{0});
  CHECK(store.labels(at({6}, {4})).empty());
  CHECK(store.labels(at({5}, {4}), 5).empty());
  store.grow(key, 7);
  CHECK(store.labels(empty_at(key)) == std::vector<Nat>{0, 1, 2, 3});
  CHECK(store.labels(at({6}, {4})) == std::vector<Nat>{0, 1});
  CHECK(store.labels(at({5}, {4})) == std::vector<Nat>{0, 1});
  CHECK(store.stamp(0, at({5}, {4})) == 6u);
  CHECK(store.grow_count(key) == 4);
  CHECK(store.last_grow_stage(key) == 7u);

  CHECK(store.n_sigma(key, 7) == 2);
  CHECK(store.n_sigma(key, 8) == 3);
  CHECK_THROWS_AS(store.n_sigma(key, 3), Error);
  CHECK_THROWS_AS(store.n_sigma({{9}, Sort::none}, 10), Error);
}

TEST_CASE("label lag over many grows") {
  LabelStore store;
  StringKey key{{1, 2}, Sort::zero};
  for (Nat g = 1; g <= 12; ++g) {
    const Nat stage = 3 + 2 * g;
    store.grow(key, stage);
    auto root = store.labels(empty_at(key)).size();
    CHECK(root == g);
    for (std::uint64_t mask = 1; mask < 64; ++mask) {
      auto f = FinSet::from_mask(mask);
      auto n = store.labels({f, key.string, key.sort}).size();
      if (f.below(stage)) {
        CHECK(n == (g >= 3 ? g - 2 : 0));
      }
      CHECK((root - n == 1 || root - n == 2 || n == 0));
    }
  }
}

TEST_CASE("long form carriers") {
  auto store = std::make_shared<LabelStore>();
  StructureSnapshot empty{Variant::cc, store, 10};
  auto lf0 = export_long_form(empty, 3);
  CHECK(lf0.carriers.empty());
  CHECK(lf0.f(CarrierElem{4}) == ElementId{CarrierElem{4}});

  auto y = at({}, {1});
  store->declare(0, y, 2);
  auto lf1 = export_long_form({Variant::cc, store, 10}, 3);
  REQUIRE(lf1.carriers.size() == 1);
  CHECK(lf1.V(0, CarrierElem{0}));
  CHECK_FALSE(lf1.V(1, CarrierElem{0}));
  CHECK(lf1.f(CarrierElem{0}) == ElementId{y});
  CHECK_FALSE(lf1.V(0, ElementId{y}));
  CHECK(lf1.U(CarrierElem{0}));
  CHECK_FALSE(lf1.U(ElementId{y}));

  StringKey key{{1}, Sort::none};
  for (Nat s = 3; s < 8; ++s) store->grow(key, s);
  store->grow({{}, Sort::none}, 8);
  for (Nat stage : {2u, 5u, 6u, 8u}) {
    StructureSnapshot snap{Variant::cc, store, stage};
    auto lf = export_long_form(snap, 3);
    CHECK(lf.reduced_facts() == reduced_facts(snap, 3));
    for (std::size_t i = 0; i < lf.carriers.size(); ++i) CHECK(lf.carriers[i].index == i);
  }
  StructureSnapshot snap{Variant::cc, store, 8};
  auto lf = export_long_form(snap, 3);
  auto ident = lift_isomorphism([](const CubeElem& e) { return e; }, lf, lf);
  for (auto [a, b] : ident) CHECK(a == b);

  auto thin = std::make_shared<LabelStore>();
  thin->declare(0, y, 2);
  auto lf_thin = export_long_form({Variant::cc, thin, 8}, 3);
  CHECK_THROWS_AS(lift_isomorphism([](const CubeElem& e) { return e; }, lf, lf_thin), Error);
}

TEST_CASE("snapshots are monotone") {
  auto store = std::make_shared<LabelStore>();
  StringKey key{{}, Sort::none};
  for (Nat s = 1; s < 10; ++s) store->grow(key, s);
  for (Nat s0 = 1; s0 < 10; ++s0) {
    for (Nat s1 = s0; s1 < 10; ++s1) {
      StructureSnapshot a{Variant::cc, store, s0}, b{Variant::cc, store, s1};
      for (std::uint64_t m = 0; m < 16; ++m) {
        CubeElem e{FinSet::from_mask(m), {}, Sort::none};
        for (Nat label : a.labels(e)) CHECK(b.holds_S(label, e));
      }
    }
  }
}
