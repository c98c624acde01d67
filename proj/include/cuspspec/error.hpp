#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

enum class ErrorCode {
  Validation,   // malformed input or violated invariant
  Unsupported,  // outside the implemented class of problems
  Numerical,    // iteration caps, overflow, insufficient data
  Internal      // a property that must hold for the discretization failed
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "E_VALIDATION";
    case ErrorCode::Unsupported: return "E_UNSUPPORTED";
    case ErrorCode::Numerical: return "E_NUMERICAL";
    case ErrorCode::Internal: return "E_INTERNAL";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::Validation, what);
}

}  // namespace cusp
