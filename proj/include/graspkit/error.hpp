#pragma once

#include <stdexcept>
#include <string>

namespace graspkit {

enum class ErrorCode {
  kInvalidArgument,
  kUnknownLabel,
  kNoValidDepth,
  kEmptyMask,
  kTooFewPoints,
  kDegenerateCloud,
  kParseError,
  kInvariantViolation,
  kNoViableClass,
  kToolMismatch,
  kIoError,
  kConfigError,
};

const char* to_string(ErrorCode code);

/// Exception type thrown by every graspkit module. The C API maps `code()`
/// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace graspkit
