#ifndef CHEMREASON_ERROR_H_
#define CHEMREASON_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chemreason {

enum class ErrorCode {
  // molgraph
  kEmptyInput,
  kUnknownSymbol,
  kMalformedBracketAtom,
  kUnclosedRing,
  kUnbalancedBranch,
  kInvalidBond,
  kInvalidAromaticity,
  kWrongSeparatorCount,
  // fingerprint
  kWidthMismatch,
  kInvalidParams,
  // rlcore
  kInvalidGroundTruth,
  kGroupTooSmall,
  kShapeMismatch,
  kInvalidSpec,
  // pipeline
  kMissingSlot,
  kUnknownDemo,
  kMissingAnchor,
  kServiceUnavailable,
  kProviderError,
  kBudgetExceeded,
  kConfigError,
  kInvalidRecord,
};

std::string_view error_code_name(ErrorCode code);

class Error: public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) { }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Thrown by the SMILES readers; position is a byte offset into the input.
class ParseError: public Error {
public:
  ParseError(ErrorCode code, std::size_t position, const std::string &what)
      : Error(code, what), position_(position) { }

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

}  // namespace chemreason

#endif  // CHEMREASON_ERROR_H_
