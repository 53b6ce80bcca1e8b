#pragma once

#include <stdexcept>
#include <string>

namespace cubecode {

enum class ErrorCode {
  dimension_too_large,
  variant_mismatch,
  undefined_label,
  config_invalid,
  parent_unchosen,
  unresolved,
  unmatched_carrier,
  invariant_broken,
  branch_outside_tree,
  out_of_range,
  inconsistent_prefixes,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cubecode
