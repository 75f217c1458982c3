#pragma once

#include <stdexcept>
#include <string>

namespace socsamp {

enum class ErrorCode {
  NegativeMass,
  BadSum,
  IndexOutOfRange,
  EmptySample,
  DimensionMismatch,
  BadParameters,
  DisconnectedAfterRetries,
  NotSymmetric,
  InvalidRow,
  Condition1Violation,
  SimplexViolation,
  ReconstructionMismatch,
  TooLargeToEnumerate,
  DegenerateWindow,
  IoFailure,
  ConfigError,
  FormatError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace socsamp
