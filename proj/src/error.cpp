#include "socsamp/error.hpp"

namespace socsamp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::BadSum: return "BadSum";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::DisconnectedAfterRetries: return "DisconnectedAfterRetries";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::InvalidRow: return "InvalidRow";
    case ErrorCode::Condition1Violation: return "Condition1Violation";
    case ErrorCode::SimplexViolation: return "SimplexViolation";
    case ErrorCode::ReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorCode::TooLargeToEnumerate: return "TooLargeToEnumerate";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace socsamp
