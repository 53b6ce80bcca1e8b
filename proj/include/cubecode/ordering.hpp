#pragma once

// Requirement types and the priority orderings they are listed in.

#include <string>
#include <string_view>
#include <vector>

#include "cubecode/labeled_structure.hpp"

namespace cubecode {

struct Requirement {
  enum class Kind { n_string, mother, daughter, u, m, idle };
  Kind kind = Kind::idle;
  NatString pi;  // n_string
  Nat r = 0;     // mother, daughter
  Nat a = 0;     // mother, daughter: 0 begins an f_i, 1 a g_j
  Nat n = 0;     // daughter
  Nat i = 0;     // u
  Nat e = 0;     // u
  Nat index = 0;  // m

  static Requirement n_string(NatString pi) { return {Kind::n_string, std::move(pi)}; }
  static Requirement mother(Nat r, Nat a) { return {Kind::mother, {}, r, a}; }
  static Requirement daughter(Nat r, Nat n, Nat a) { return {Kind::daughter, {}, r, a, n}; }
  static Requirement u(Nat i, Nat e) { return {Kind::u, {}, 0, 0, 0, i, e}; }
  static Requirement m(Nat index) { return {Kind::m, {}, 0, 0, 0, 0, 0, index}; }
  static Requirement idle() { return {}; }

  friend bool operator==(const Requirement&, const Requirement&) = default;
  friend auto operator<=>(const Requirement&, const Requirement&) = default;
};

/// `N<0,1>`, `N3^0` (mother r=3, a=0), `N3,2^0` (daughter n=2), `U2,0`,
/// `M0`, `idle`.
std::string format_requirement(const Requirement& req);
Requirement parse_requirement(std::string_view token);

/// N_<> first, then the remaining tree strings breadth first, interleaved
/// with the M_i.
std::vector<Requirement> default_cc_ordering(const std::vector<NatString>& tree,
                                             Nat adversaries);
/// Throws config_invalid unless N_<> is first, prefixes come before their
/// extensions, every N-type names a tree string and nothing repeats.
void validate_cc_ordering(const std::vector<Requirement>& ordering,
                          const std::vector<NatString>& tree);

struct DcShape {
  Nat mothers = 2;    // r < mothers, for both a
  Nat daughters = 10; // n in 1..daughters
  Nat u_indices = 0;  // U_{i,e} for i < u_indices
  Nat u_functionals = 0;  // ... and e < u_functionals
  Nat adversaries = 0;
};

/// Dovetailed rounds: in round k, the mothers with r = k, the daughters
/// with r + n = k, the U_{i,e} with i + e = k, then M_k.
std::vector<Requirement> default_dc_ordering(const DcShape& shape);
/// Throws config_invalid unless each mother precedes its daughters and
/// daughter n precedes daughter n+1.
void validate_dc_ordering(const std::vector<Requirement>& ordering);

}  // namespace cubecode
