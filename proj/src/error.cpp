#include "graspkit/error.hpp"

namespace graspkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kNoValidDepth: return "NoValidDepth";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDegenerateCloud: return "DegenerateCloud";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kNoViableClass: return "NoViableClass";
    case ErrorCode::kToolMismatch: return "ToolMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace graspkit
