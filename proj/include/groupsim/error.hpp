#pragma once

#include <stdexcept>
#include <string>

namespace groupsim {

enum class ErrorCode {
  kInvalidRange,
  kEmptyItems,
  kBadWeights,
  kZeroCount,
  kInvalidCount,
  kInvalidInterval,
  kEmptyAllowedActions,
  kPlacementFailure,
  kCoincidentPoints,
  kDimensionMismatch,
  kEmptySet,
  kSingletonSet,
  kUndersizedClass,
  kSinglePerson,
  kIoError,
  kParseError,
  kEmptyDataset,
  kInvalidConfig,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace groupsim
