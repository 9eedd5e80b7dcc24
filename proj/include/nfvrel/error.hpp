#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nfvrel {

enum class ErrorCode {
  kDimensionMismatch,
  kAsymmetricAdjacency,
  kCapacityDeficit,
  kProbabilityOutOfRange,
  kInvalidLogicalLayer,
  kInvalidChainComposition,
  kIndexOutOfRange,
  kEnumerationLimitExceeded,
  kNonIntegerReplication,
  kInvalidArgument,
  kParseError,
};

std::string_view error_code_name(ErrorCode code);

// Every error raised by the library carries a code so the CLI can map it to
// an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for the structural instance errors raised by validate_instance.
  bool is_validation_error() const noexcept {
    switch (code_) {
      case ErrorCode::kDimensionMismatch:
      case ErrorCode::kAsymmetricAdjacency:
      case ErrorCode::kCapacityDeficit:
      case ErrorCode::kProbabilityOutOfRange:
      case ErrorCode::kInvalidLogicalLayer:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace nfvrel
