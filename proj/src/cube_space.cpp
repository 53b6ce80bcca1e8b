#include "cubecode/cube_space.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cubecode/error.hpp"

namespace cubecode {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_too_large: return "dimension-too-large";
    case ErrorCode::variant_mismatch: return "variant-mismatch";
    case ErrorCode::undefined_label: return "undefined-label";
    case ErrorCode::config_invalid: return "config-invalid";
    case ErrorCode::parent_unchosen: return "parent-unchosen";
    case ErrorCode::unresolved: return "unresolved";
    case ErrorCode::unmatched_carrier: return "unmatched-carrier";
    case ErrorCode::invariant_broken: return "invariant-broken";
    case ErrorCode::branch_outside_tree: return "branch-outside-tree";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::inconsistent_prefixes: return "inconsistent-prefixes";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

FinSet::FinSet(std::initializer_list<Nat> elems) : FinSet(std::vector<Nat>(elems)) {}

FinSet::FinSet(std::vector<Nat> elems) : elems_(std::move(elems)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

FinSet FinSet::from_mask(std::uint64_t mask) {
  FinSet out;
  for (Nat i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1U) out.elems_.push_back(i);
  }
  return out;
}

bool FinSet::contains(Nat x) const {
  return std::binary_search(elems_.begin(), elems_.end(), x);
}

std::uint64_t FinSet::mask() const {
  std::uint64_t m = 0;
  for (Nat x : elems_) m |= std::uint64_t{1} << x;
  return m;
}

std::string FinSet::str() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (i) out << ',';
    out << elems_[i];
  }
  out << '}';
  return out.str();
}

FinSet symm_diff(const FinSet& f, const FinSet& g) {
  std::vector<Nat> out;
  std::set_symmetric_difference(f.begin(), f.end(), g.begin(), g.end(),
                                std::back_inserter(out));
  return FinSet(std::move(out));
}

std::optional<Nat> edge_color(const FinSet& f, const FinSet& g) {
  FinSet d = symm_diff(f, g);
  if (d.size() != 1) return std::nullopt;
  return d.max();
}

CubeMap translation_map(Nat dimension, const FinSet& h) {
  CubeMap map{dimension, std::vector<std::uint32_t>(std::size_t{1} << dimension)};
  const auto hm = static_cast<std::uint32_t>(h.mask());
  for (std::uint32_t v = 0; v < map.assignment.size(); ++v) map.assignment[v] = v ^ hm;
  return map;
}

bool preserves_edges(const CubeMap& map) {
  const std::size_t n = std::size_t{1} << map.dimension;
  if (map.assignment.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto image : map.assignment) {
    if (image >= n || seen[image]) return false;
    seen[image] = true;
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    for (Nat i = 0; i < map.dimension; ++i) {
      const std::uint32_t w = v ^ (1U << i);
      if ((map.assignment[v] ^ map.assignment[w]) != (1U << i)) return false;
    }
  }
  return true;
}

namespace {

std::vector<CubeMap> exhaustive_search(Nat dimension) {
  std::vector<std::uint32_t> perm(std::size_t{1} << dimension);
  std::iota(perm.begin(), perm.end(), 0U);
  std::vector<CubeMap> out;
  do {
    CubeMap candidate{dimension, perm};
    if (preserves_edges(candidate)) out.push_back(std::move(candidate));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Any color-preserving map is determined by the image of the empty set:
// once g(G) is known, g(G + {i}) must be the color-i neighbour of g(G).
std::vector<CubeMap> determined_extension_search(Nat dimension) {
  const std::size_t n = std::size_t{1} << dimension;
  std::vector<CubeMap> out;
  for (std::uint32_t root = 0; root < n; ++root) {
    CubeMap candidate{dimension, std::vector<std::uint32_t>(n)};
    candidate.assignment[0] = root;
    for (std::uint32_t v = 1; v < n; ++v) {
      const Nat low = static_cast<Nat>(__builtin_ctz(v));
      const std::uint32_t parent = v ^ (1U << low);
      candidate.assignment[v] = candidate.assignment[parent] ^ (1U << low);
    }
    if (preserves_edges(candidate)) out.push_back(std::move(candidate));
  }
  return out;
}

}  // namespace

std::vector<CubeMap> enumerate_cube_automorphisms(Nat dimension) {
  if (dimension > kMaxEnumerationDimension) {
    throw Error(ErrorCode::dimension_too_large,
                "cube dimension " + std::to_string(dimension) + " exceeds 4");
  }
  auto out = dimension <= 3 ? exhaustive_search(dimension)
                            : determined_extension_search(dimension);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cubecode
