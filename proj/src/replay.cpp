#include "cubecode/replay.hpp"

#include <charconv>
#include <sstream>

#include "cubecode/error.hpp"

namespace cubecode {

namespace {

Nat to_nat(std::string_view text) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse_error, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

const std::string& field(const Event& e, std::size_t i) {
  if (i >= e.fields.size()) {
    throw Error(ErrorCode::parse_error, "event " + e.tag + " is missing field " + std::to_string(i));
  }
  return e.fields[i];
}

}  // namespace

void write_trace_config(Trace& trace, const TraceConfig& config) {
  trace.header("# cubecode trace v1");
  trace.header(std::string("# variant ") + to_string(config.variant));
  trace.header("# window " + std::to_string(config.window.box_length) + " " +
               std::to_string(config.window.box_width) + " " +
               std::to_string(config.window.support));
}

TraceConfig read_trace_config(const Trace& trace) {
  TraceConfig out;
  bool saw_variant = false;
  for (const auto& line : trace.headers()) {
    std::istringstream in(line);
    std::string hash, word;
    in >> hash >> word;
    if (word == "variant") {
      std::string v;
      in >> v;
      out.variant = parse_variant(v);
      saw_variant = true;
    } else if (word == "window") {
      in >> out.window.box_length >> out.window.box_width >> out.window.support;
      if (!in) throw Error(ErrorCode::parse_error, "bad window header");
    }
  }
  if (!saw_variant) throw Error(ErrorCode::parse_error, "trace has no variant header");
  return out;
}

LabelStore replay_store(const Trace& trace, Nat up_to_stage) {
  LabelStore store;
  for (const auto& e : trace.events()) {
    if (e.stage > up_to_stage) break;
    if (e.tag == "GR") {
      store.grow(parse_key(field(e, 1)), e.stage);
    } else if (e.tag == "D") {
      store.declare(0, empty_at(parse_key(field(e, 0))), e.stage);
    }
  }
  return store;
}

std::map<StringKey, std::vector<ChoiceRecord>> replay_choices(const Trace& trace,
                                                              Nat up_to_stage) {
  std::map<StringKey, std::vector<ChoiceRecord>> out;
  for (const auto& e : trace.events()) {
    if (e.stage > up_to_stage) break;
    if (e.tag != "C" && e.tag != "ST") continue;
    out[parse_key(field(e, 1))].push_back({e.stage, to_nat(field(e, 0)), e.tag == "ST"});
  }
  return out;
}

StringWindow replay_window(const Trace& trace, Nat up_to_stage) {
  StringWindow window(read_trace_config(trace).window);
  for (const auto& [key, records] : replay_choices(trace, up_to_stage)) {
    window.add_chosen(key.string);
  }
  return window;
}

std::string join_keys(const std::set<StringKey>& keys) {
  if (keys.empty()) return "-";
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ';';
    out += format_key(k);
  }
  return out;
}

std::set<StringKey> split_keys(std::string_view text) {
  std::set<StringKey> out;
  if (text == "-") return out;
  while (!text.empty()) {
    auto semi = text.find(';');
    out.insert(parse_key(text.substr(0, semi)));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return out;
}

}  // namespace cubecode
