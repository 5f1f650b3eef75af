#include "chemreason/error.h"

namespace chemreason {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::kEmptyInput: return "EmptyInput";
  case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
  case ErrorCode::kMalformedBracketAtom: return "MalformedBracketAtom";
  case ErrorCode::kUnclosedRing: return "UnclosedRing";
  case ErrorCode::kUnbalancedBranch: return "UnbalancedBranch";
  case ErrorCode::kInvalidBond: return "InvalidBond";
  case ErrorCode::kInvalidAromaticity: return "InvalidAromaticity";
  case ErrorCode::kWrongSeparatorCount: return "WrongSeparatorCount";
  case ErrorCode::kWidthMismatch: return "WidthMismatch";
  case ErrorCode::kInvalidParams: return "InvalidParams";
  case ErrorCode::kInvalidGroundTruth: return "InvalidGroundTruth";
  case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
  case ErrorCode::kShapeMismatch: return "ShapeMismatch";
  case ErrorCode::kInvalidSpec: return "InvalidSpec";
  case ErrorCode::kMissingSlot: return "MissingSlot";
  case ErrorCode::kUnknownDemo: return "UnknownDemo";
  case ErrorCode::kMissingAnchor: return "MissingAnchor";
  case ErrorCode::kServiceUnavailable: return "ServiceUnavailable";
  case ErrorCode::kProviderError: return "ProviderError";
  case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
  case ErrorCode::kConfigError: return "ConfigError";
  case ErrorCode::kInvalidRecord: return "InvalidRecord";
  }
  return "Unknown";
}

}  // namespace chemreason
