#include "cubecode/functional.hpp"

#include <algorithm>
#include <charconv>

#include "cubecode/error.hpp"

namespace cubecode {

namespace {

Nat parse_param(std::string_view text, std::string_view whole) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::config_invalid, "bad parameter in '" + std::string(whole) + "'");
  }
  return v;
}

std::pair<std::string_view, std::string_view> split_colon(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return {text, {}};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

}  // namespace

bool PhiRow::holds(Nat s) const {
  switch (kind) {
    case Kind::until: return s < value;
    case Kind::periodic: return value != 0 && s % value == 0;
    case Kind::never: return false;
  }
  return false;
}

std::optional<Nat> PhiRow::s0() const {
  switch (kind) {
    case Kind::until: return value;
    case Kind::never: return 0;
    case Kind::periodic: return std::nullopt;
  }
  return std::nullopt;
}

std::string format_phi_row(const PhiRow& row) {
  switch (row.kind) {
    case PhiRow::Kind::until: return "until:" + std::to_string(row.value);
    case PhiRow::Kind::periodic: return "periodic:" + std::to_string(row.value);
    case PhiRow::Kind::never: return "never";
  }
  return "never";
}

PhiRow parse_phi_row(std::string_view text) {
  auto [head, tail] = split_colon(text);
  if (head == "never") return {PhiRow::Kind::never, 0};
  if (head == "until") return {PhiRow::Kind::until, parse_param(tail, text)};
  if (head == "periodic") {
    const Nat p = parse_param(tail, text);
    if (p == 0) throw Error(ErrorCode::config_invalid, "period must be positive");
    return {PhiRow::Kind::periodic, p};
  }
  throw Error(ErrorCode::config_invalid, "unknown phi row '" + std::string(text) + "'");
}

bool PhiPredicate::holds(Nat n, Nat s) const {
  return n < rows_.size() && rows_[n].holds(s);
}

const PhiRow& PhiPredicate::row(Nat n) const {
  if (n >= rows_.size()) {
    throw Error(ErrorCode::out_of_range,
                "n = " + std::to_string(n) + " outside the declared range " +
                    std::to_string(rows_.size()));
  }
  return rows_[n];
}

std::optional<Nat> Functional::run(const std::vector<NatString>& oracle, Nat, Nat steps) const {
  switch (kind) {
    case Kind::constant0:
      if (steps < 1) return std::nullopt;
      return 0;
    case Kind::length_threshold: {
      // reads param entries of every string, one step each
      if (steps < std::max<Nat>(param, 1)) return std::nullopt;
      for (const auto& s : oracle) {
        if (s.size() < param) return std::nullopt;
      }
      return 0;
    }
    case Kind::bit_probe: {
      if (steps < param + 1 || oracle.empty()) return std::nullopt;
      const auto& s = oracle[param % oracle.size()];
      const std::size_t at = param / oracle.size();
      if (at >= s.size()) return std::nullopt;
      return s[at] % 2;
    }
  }
  return std::nullopt;
}

std::string format_functional(const Functional& f) {
  switch (f.kind) {
    case Functional::Kind::constant0: return "constant0";
    case Functional::Kind::length_threshold: return "length_threshold:" + std::to_string(f.param);
    case Functional::Kind::bit_probe: return "bit_probe:" + std::to_string(f.param);
  }
  return "constant0";
}

Functional parse_functional(std::string_view text) {
  auto [head, tail] = split_colon(text);
  if (head == "constant0") return {Functional::Kind::constant0, 0};
  if (head == "length_threshold") {
    return {Functional::Kind::length_threshold, parse_param(tail, text)};
  }
  if (head == "bit_probe") return {Functional::Kind::bit_probe, parse_param(tail, text)};
  throw Error(ErrorCode::config_invalid, "unknown functional '" + std::string(text) + "'");
}

bool HaltingSim::contains(Nat x, Nat at_stage) const {
  auto it = entered_.find(x);
  return it != entered_.end() && it->second <= at_stage;
}

std::optional<Nat> HaltingSim::entered_at(Nat x) const {
  auto it = entered_.find(x);
  if (it == entered_.end()) return std::nullopt;
  return it->second;
}

std::string HaltingSim::dump() const {
  std::string out;
  for (const auto& [x, s] : entered_) out += std::to_string(x) + " " + std::to_string(s) + "\n";
  return out;
}

}  // namespace cubecode
