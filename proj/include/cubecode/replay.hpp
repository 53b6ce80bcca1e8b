#pragma once

// Rebuilding construction state from a trace alone.

#include <map>
#include <set>
#include <vector>

#include "cubecode/labeled_structure.hpp"
#include "cubecode/trace.hpp"
#include "cubecode/window.hpp"

namespace cubecode {

/// Trace header facts written by both constructions.
struct TraceConfig {
  Variant variant = Variant::cc;
  WindowParams window;
};
TraceConfig read_trace_config(const Trace& trace);
void write_trace_config(Trace& trace, const TraceConfig& config);

/// Re-applies the GR / D events up to and including `up_to_stage`.
LabelStore replay_store(const Trace& trace, Nat up_to_stage = kEndOfTime);

/// Every (stage, node) that chose or stole a key, in trace order.
struct ChoiceRecord {
  Nat stage = 0;
  NodeId node = 0;
  bool stolen = false;
};
std::map<StringKey, std::vector<ChoiceRecord>> replay_choices(const Trace& trace,
                                                              Nat up_to_stage = kEndOfTime);

/// The string window as it stood after `up_to_stage`.
StringWindow replay_window(const Trace& trace, Nat up_to_stage = kEndOfTime);

std::string join_keys(const std::set<StringKey>& keys);
std::set<StringKey> split_keys(std::string_view text);

}  // namespace cubecode
