#pragma once

// The edge-colored hypercube [omega]^{<omega}: finite sets of naturals as
// vertices, an edge of color i between F and G iff F xor G = {i}.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace cubecode {

using Nat = std::uint32_t;

/// A finite set of naturals, stored sorted and duplicate free.
class FinSet {
 public:
  FinSet() = default;
  FinSet(std::initializer_list<Nat> elems);
  explicit FinSet(std::vector<Nat> elems);

  /// The set whose members are the positions of the one bits of `mask`.
  static FinSet from_mask(std::uint64_t mask);

  bool contains(Nat x) const;
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  /// Largest member; the set must be nonempty.
  Nat max() const { return elems_.back(); }
  /// Bitmask form; every member must be below 64.
  std::uint64_t mask() const;
  /// True when every member is below `bound`.
  bool below(Nat bound) const { return elems_.empty() || elems_.back() < bound; }

  const std::vector<Nat>& elements() const { return elems_; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  /// Canonical text form: `{}` or `{1,3}`.
  std::string str() const;

  friend bool operator==(const FinSet&, const FinSet&) = default;
  friend auto operator<=>(const FinSet& a, const FinSet& b) {
    return a.elems_ <=> b.elems_;
  }

 private:
  std::vector<Nat> elems_;
};

FinSet symm_diff(const FinSet& f, const FinSet& g);

/// The color i with F xor G = {i}, absent when F and G are not adjacent.
std::optional<Nat> edge_color(const FinSet& f, const FinSet& g);

/// The cube automorphism F -> F xor H.
inline FinSet translate(const FinSet& f, const FinSet& h) { return symm_diff(f, h); }

enum class Parity { even, odd };

inline Parity parity(const FinSet& f) {
  return f.size() % 2 == 0 ? Parity::even : Parity::odd;
}

/// A bijection on the 2^d vertices of the d-cube, vertices encoded as
/// bitmasks over {0,...,d-1}.
struct CubeMap {
  Nat dimension = 0;
  std::vector<std::uint32_t> assignment;

  friend bool operator==(const CubeMap&, const CubeMap&) = default;
  friend auto operator<=>(const CubeMap&, const CubeMap&) = default;
};

CubeMap translation_map(Nat dimension, const FinSet& h);

/// True iff `map` is a bijection preserving every color-i edge, i < d.
bool preserves_edges(const CubeMap& map);

inline constexpr Nat kMaxEnumerationDimension = 4;

/// All color-preserving bijections of the d-cube. Dimensions up to 3 use
/// raw permutation search; dimension 4 fixes the image of the empty set
/// and propagates along edges. Throws dimension_too_large above 4.
std::vector<CubeMap> enumerate_cube_automorphisms(Nat dimension);

}  // namespace cubecode
