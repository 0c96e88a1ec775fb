#pragma once

#include <stdexcept>
#include <string>

namespace fredlab {

enum class ErrorCode {
  invalid_argument = 1,
  range = 2,
  geometry_mismatch = 3,
  configuration = 4,
  gap_violation = 5,
  not_hermitian = 6,
  numerical_integrity = 7,
  ambiguous = 8,
  not_converged = 9,
  io = 10,
  schema = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::range: return "range";
    case ErrorCode::geometry_mismatch: return "geometry-mismatch";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::gap_violation: return "gap-violation";
    case ErrorCode::not_hermitian: return "not-hermitian";
    case ErrorCode::numerical_integrity: return "numerical-integrity";
    case ErrorCode::ambiguous: return "ambiguous";
    case ErrorCode::not_converged: return "not-converged";
    case ErrorCode::io: return "io";
    case ErrorCode::schema: return "schema";
  }
  return "unknown";
}

}  // namespace fredlab
