#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psne {

enum class ErrorCode {
  kIndexOutOfRange,
  kInvalidMatrix,
  kInvalidParams,
  kNoStrictPsne,
  kSkewViolation,
  kRejectionLimit,
  kEmptyArmSet,
  kBudgetTooSmall,
  kMaxRoundsExceeded,
  kInvalidCounts,
  kConfig,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kNoStrictPsne: return "NoStrictPSNE";
    case ErrorCode::kSkewViolation: return "SkewViolation";
    case ErrorCode::kRejectionLimit: return "RejectionLimit";
    case ErrorCode::kEmptyArmSet: return "EmptyArmSet";
    case ErrorCode::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::kMaxRoundsExceeded: return "MaxRoundsExceeded";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

// Every recoverable failure in the library is reported through this type;
// callers switch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace psne
