#include "cubecode/engine.hpp"

#include <algorithm>
#include <map>

#include "cubecode/error.hpp"

namespace cubecode {

Engine::Engine(Construction& construction, Trace& trace)
    : construction_(construction), trace_(trace) {}

void Engine::run(Nat horizon) {
  if (horizon < 1) throw Error(ErrorCode::config_invalid, "horizon must be at least 1");
  for (Nat s = stage_ + 1; s <= horizon; ++s) run_stage(s);
}

void Engine::run_stage(Nat s) {
  stage_ = s;
  trace_.add(s, "S");
  construction_.begin_stage(nodes_, s);
  std::optional<NodeId> parent;
  Outcome via;
  for (Nat depth = 0; depth <= s; ++depth) {
    std::optional<NodeId> cur = parent ? nodes_.child(*parent, via)
                                       : (nodes_.empty() ? std::nullopt
                                                         : std::optional<NodeId>{0});
    if (!cur) {
      cur = nodes_.add(parent, via, s);
      auto type = construction_.assign_type(nodes_, *cur, s);
      nodes_.at(*cur).type = type;
      trace_.add(s, "T",
                 {std::to_string(*cur), parent ? std::to_string(*parent) : "-",
                  parent ? format_outcome(via) : "-", type});
    }
    const Outcome o = construction_.visit(nodes_, *cur, s);
    nodes_.at(*cur).history.emplace_back(s, o);
    trace_.add(s, "V", {std::to_string(*cur), format_outcome(o)});
    parent = cur;
    via = o;
  }
  construction_.end_stage(nodes_, s);
}

std::vector<PathStep> true_path_approx(const NodeStore& nodes, Nat horizon,
                                       TruePathParams params) {
  std::vector<PathStep> out;
  if (nodes.empty()) return out;
  NodeId cur = 0;
  while (true) {
    const auto& node = nodes[cur];
    PathStep step{cur, node.type, 0, std::nullopt, 0};
    std::vector<Outcome> seen;
    for (const auto& [stage, o] : node.history) {
      if (stage <= horizon) seen.push_back(o);
    }
    step.visits = seen.size();
    const std::size_t from = seen.size() > params.recent ? seen.size() - params.recent : 0;
    std::map<Outcome, std::size_t> counts;
    for (std::size_t i = from; i < seen.size(); ++i) counts[seen[i]]++;
    std::optional<Outcome> best;
    for (const auto& [o, c] : counts) {
      if (c < params.threshold) continue;
      if (!best || left_of(o, *best)) best = o;
    }
    if (best) {
      step.outcome = best;
      step.support = counts[*best];
    }
    out.push_back(step);
    if (!best) break;
    auto next = nodes.child(cur, *best);
    if (!next || nodes[*next].first_visit > horizon) break;
    cur = *next;
  }
  return out;
}

LeftKillReport check_left_kill(const TraceIndex& index) {
  const auto& nodes = index.nodes();
  std::vector<bool> killed(nodes.size(), false);
  for (Nat s = 0; s <= index.horizon(); ++s) {
    const auto& path = index.visits(s);
    for (std::size_t d = 0; d < path.size(); ++d) {
      if (killed[path[d]]) return {false, path[d], s};
    }
    // Everything hanging to the right of this stage's path is dead now.
    for (std::size_t d = 0; d < path.size(); ++d) {
      const auto& node = nodes[path[d]];
      auto it = std::lower_bound(node.history.begin(), node.history.end(), s,
                                 [](const auto& h, Nat st) { return h.first < st; });
      if (it == node.history.end() || it->first != s) continue;
      const Outcome* taken = &it->second;
      for (const auto& [o, child] : node.children) {
        if (left_of(*taken, o) && nodes[child].first_visit <= s) killed[child] = true;
      }
    }
  }
  return {};
}

}  // namespace cubecode
