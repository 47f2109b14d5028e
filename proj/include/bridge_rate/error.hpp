#pragma once

#include <stdexcept>
#include <string>

namespace bridge_rate {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  Unsupported,
  SizeCap,
  TooLarge,
  QuadratureFailure,
  SolverFailure,
  InternalError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID";
    case ErrorCode::NotFound: return "NOTFOUND";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::SizeCap: return "SIZECAP";
    case ErrorCode::TooLarge: return "TOOLARGE";
    case ErrorCode::QuadratureFailure: return "QUADRATURE";
    case ErrorCode::SolverFailure: return "SOLVER";
    case ErrorCode::InternalError: return "INTERNAL";
  }
  return "UNKNOWN";
}

/// Single exception type for the library; `code()` tells callers (and the
/// CLI exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace bridge_rate
