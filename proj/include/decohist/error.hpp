#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace decohist {

enum class ErrorKind {
  NotSquare,
  NonFinite,
  NotHermitian,
  NotPSD,
  TraceNotOne,
  NotUnitary,
  IncompleteInstrument,
  DuplicateEffect,
  DimensionMismatch,
  PathMismatch,
  PathBudgetExceeded,
  SubsetBudgetExceeded,
  SubsetInvalid,
  ZeroProbabilityOutcome,
  UnknownOutcome,
  NotHermitianEffects,
  NumericalUnderflow,
  AsymmetricDirectionSet,
  CoverageError,
  UnresolvableWidth,
  EdgeOverlap,
  InvalidArgument,
  SyntaxError,
  UnknownModel,
  UnknownKey,
  InvalidScenario,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported as an Error carrying a kind, so
/// callers (and the CLI) can branch on the category without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace decohist
