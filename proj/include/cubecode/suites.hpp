#pragma once

// Named verification suites over a finished trace, shared by the command
// line and the acceptance driver.

#include <string>
#include <vector>

#include "cubecode/adversary.hpp"
#include "cubecode/engine.hpp"
#include "cubecode/functional.hpp"
#include "cubecode/trace.hpp"
#include "cubecode/verify.hpp"

namespace cubecode {

/// Stage of the last event, 0 for an empty trace.
Nat trace_horizon(const Trace& trace);

/// Stages at which `node` took an infinite outcome, ascending.
std::vector<Nat> infinite_stages(const Trace& trace, NodeId node);

/// Every triple i < j < n with f_i and g_j extracted and n in the range of
/// phi. Triples whose prefixes are too short are skipped, not failed.
Report modulus_suite(const Trace& trace, const PhiPredicate& phi, Nat horizon,
                     TruePathParams params = {});

/// One `diagonalization` entry per U on the true-path approximation.
Report diagonalization_suite(const Trace& trace, const std::vector<Functional>& functionals,
                             Nat horizon, TruePathParams params = {});

/// For each adversary k, the M-node of type `M<k>` on the true-path
/// approximation must take at least `min_infinite` infinite outcomes, and
/// the extracted g must pass check_isomorphism with the adversary's delay
/// as lag. A stall is tolerated only on a key that entered the range after
/// stage t - delay, t the second to last infinite stage.
Report isomorphism_suite(const Trace& trace, const std::vector<const Adversary*>& adversaries,
                         Nat horizon, Nat min_infinite = 20, TruePathParams params = {});

/// Known suite names: invariants, labeling, modulus, diagonalization,
/// isomorphism.
const std::vector<std::string>& suite_names();

}  // namespace cubecode
