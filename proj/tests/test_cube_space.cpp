#include <algorithm>
#include <set>

#include "cubecode/cube_space.hpp"
#include "cubecode/error.hpp"
#include "doctest.h"

using namespace cubecode;

namespace {

// Independent oracle: adjacency matrix check over every permutation, written
// without the library's bitmask shortcuts.
std::size_t brute_force_count(Nat d, std::set<std::vector<std::uint32_t>>& found) {
  const std::uint32_t n = 1U << d;
  std::vector<std::uint32_t> p(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  std::size_t count = 0;
  do {
    bool ok = true;
    for (std::uint32_t a = 0; a < n && ok; ++a) {
      for (std::uint32_t b = 0; b < n && ok; ++b) {
        auto ca = edge_color(FinSet::from_mask(a), FinSet::from_mask(b));
        auto cb = edge_color(FinSet::from_mask(p[a]), FinSet::from_mask(p[b]));
        if (ca != cb) ok = false;
      }
    }
    if (ok) {
      ++count;
      found.insert(p);
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

}  // namespace

TEST_CASE("symmetric difference and colors") {
  CHECK(symm_diff({}, {3}) == FinSet{3});
  CHECK(symm_diff({1, 2}, {2, 3}) == FinSet{1, 3});
  CHECK(symm_diff({4, 7}, {4, 7}).empty());
  CHECK(edge_color({}, {2}) == 2u);
  CHECK_FALSE(edge_color({1}, {1}));
  CHECK_FALSE(edge_color({0, 1}, {0, 2}));
  CHECK(FinSet{3, 1, 3}.str() == "{1,3}");
}

TEST_CASE("translations and parity") {
  FinSet h{1, 2};
  CHECK(translate({}, h) == h);
  CHECK(translate({1}, h) == FinSet{2});
  CHECK(parity({}) == Parity::even);
  CHECK(parity({5}) == Parity::odd);
  CHECK(parity({1, 2}) == Parity::even);
  for (std::uint64_t f = 0; f < 32; ++f) {
    for (std::uint64_t g = 0; g < 32; ++g) {
      for (std::uint64_t hm : {0ULL, 1ULL, 6ULL, 19ULL}) {
        auto F = FinSet::from_mask(f), G = FinSet::from_mask(g), H = FinSet::from_mask(hm);
        CHECK(edge_color(F, G) == edge_color(translate(F, H), translate(G, H)));
        CHECK((parity(translate(F, H)) == parity(F)) == (H.size() % 2 == 0));
      }
    }
  }
}

TEST_CASE("automorphism enumeration matches brute force") {
  for (Nat d = 0; d <= 3; ++d) {
    std::set<std::vector<std::uint32_t>> oracle;
    const auto expected = brute_force_count(d, oracle);
    CHECK(expected == (1u << d));
    auto maps = enumerate_cube_automorphisms(d);
    REQUIRE(maps.size() == expected);
    for (const auto& m : maps) CHECK(oracle.count(m.assignment) == 1);
    for (std::uint64_t h = 0; h < (1u << d); ++h) {
      auto t = translation_map(d, FinSet::from_mask(h));
      CHECK(std::find(maps.begin(), maps.end(), t) != maps.end());
    }
  }
  auto four = enumerate_cube_automorphisms(4);
  CHECK(four.size() == 16);
  for (const auto& m : four) {
    CHECK(m == translation_map(4, FinSet::from_mask(m.assignment[0])));
  }
  CHECK_THROWS_AS(enumerate_cube_automorphisms(5), Error);
}
