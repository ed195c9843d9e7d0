#include "groupsim/error.hpp"

namespace groupsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidRange: return "invalid-range";
    case ErrorCode::kEmptyItems: return "empty-items";
    case ErrorCode::kBadWeights: return "bad-weights";
    case ErrorCode::kZeroCount: return "zero-count";
    case ErrorCode::kInvalidCount: return "invalid-count";
    case ErrorCode::kInvalidInterval: return "invalid-interval";
    case ErrorCode::kEmptyAllowedActions: return "empty-allowed-actions";
    case ErrorCode::kPlacementFailure: return "placement-failure";
    case ErrorCode::kCoincidentPoints: return "coincident-points";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptySet: return "empty-set";
    case ErrorCode::kSingletonSet: return "singleton-set";
    case ErrorCode::kUndersizedClass: return "undersized-class";
    case ErrorCode::kSinglePerson: return "single-person";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

}  // namespace groupsim
