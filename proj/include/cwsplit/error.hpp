#pragma once

#include <stdexcept>
#include <string>

namespace cwsplit {

enum class ErrorKind {
  invalid_dimension,
  unsupported_order,
  invalid_argument,
  complex_time_unsupported,
  overflow,
  non_convergence,
  precision_floor,
  insufficient_data,
  grid_mismatch,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid dimension";
    case ErrorKind::unsupported_order: return "unsupported order";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::complex_time_unsupported: return "complex time unsupported";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::precision_floor: return "precision floor";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::grid_mismatch: return "grid mismatch";
    case ErrorKind::io: return "i/o error";
  }
  return "unknown";
}

// Every failure in the library is reported as an Error carrying a kind, so
// callers (the CLI in particular) can map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace cwsplit
