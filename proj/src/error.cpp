#include "decohist/error.hpp"

namespace decohist {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::IncompleteInstrument: return "IncompleteInstrument";
    case ErrorKind::DuplicateEffect: return "DuplicateEffect";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::PathMismatch: return "PathMismatch";
    case ErrorKind::PathBudgetExceeded: return "PathBudgetExceeded";
    case ErrorKind::SubsetBudgetExceeded: return "SubsetBudgetExceeded";
    case ErrorKind::SubsetInvalid: return "SubsetInvalid";
    case ErrorKind::ZeroProbabilityOutcome: return "ZeroProbabilityOutcome";
    case ErrorKind::UnknownOutcome: return "UnknownOutcome";
    case ErrorKind::NotHermitianEffects: return "NotHermitianEffects";
    case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorKind::AsymmetricDirectionSet: return "AsymmetricDirectionSet";
    case ErrorKind::CoverageError: return "CoverageError";
    case ErrorKind::UnresolvableWidth: return "UnresolvableWidth";
    case ErrorKind::EdgeOverlap: return "EdgeOverlap";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
  }
  return "Unknown";
}

}  // namespace decohist
