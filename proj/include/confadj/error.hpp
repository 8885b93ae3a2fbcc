#pragma once

#include <stdexcept>
#include <string>

namespace confadj {

// Failure categories surfaced to callers; the CLI maps them onto exit codes
// and a machine-readable error object.
enum class errc {
  invalid_argument,   // bad sizes, out-of-range parameters, unknown names
  dimension_mismatch, // inputs whose shapes disagree with each other
  singular_input,     // rank deficiency / condition-number guard tripped
  non_finite,         // NaN or infinity where finite values are required
  degenerate_input,   // structurally empty input (e.g. all-zero residuals)
  parse_failure,      // malformed table or config text
  io_failure,         // filesystem problems
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::singular_input: return "singular_input";
    case errc::non_finite: return "non_finite";
    case errc::degenerate_input: return "degenerate_input";
    case errc::parse_failure: return "parse_failure";
    case errc::io_failure: return "io_failure";
  }
  return "unknown";
}

struct error : std::runtime_error {
  errc code;
  error(errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) throw error(code, what);
}

} // namespace confadj
