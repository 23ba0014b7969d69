#include "dyadic/error.hpp"

namespace dyadic {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::AlternationViolation: return "AlternationViolation";
    case Errc::OrphanTurn: return "OrphanTurn";
    case Errc::DuplicateStory: return "DuplicateStory";
    case Errc::MissingRectification: return "MissingRectification";
    case Errc::ProviderUnavailable: return "ProviderUnavailable";
    case Errc::ProviderNonDeterministic: return "ProviderNonDeterministic";
    case Errc::CapabilityMismatch: return "CapabilityMismatch";
    case Errc::DimensionDrift: return "DimensionDrift";
    case Errc::EmptyGeneration: return "EmptyGeneration";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::TokenizerMismatch: return "TokenizerMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InsufficientPairs: return "InsufficientPairs";
    case Errc::EmptyCell: return "EmptyCell";
    case Errc::Unbalanced: return "Unbalanced";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::Singular: return "Singular";
    case Errc::NotConverged: return "NotConverged";
    case Errc::TooShort: return "TooShort";
    case Errc::TooFewVectors: return "TooFewVectors";
    case Errc::EmptyWordList: return "EmptyWordList";
    case Errc::MethodMismatch: return "MethodMismatch";
    case Errc::BoundaryExcluded: return "BoundaryExcluded";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::StageFailed: return "StageFailed";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigInvalid:
    case Errc::Io:
      return 2;
    case Errc::ProviderUnavailable:
    case Errc::ProviderNonDeterministic:
    case Errc::CapabilityMismatch:
    case Errc::DimensionDrift:
    case Errc::EmptyGeneration:
    case Errc::BudgetExceeded:
    case Errc::TokenizerMismatch:
      return 3;
    default:
      return 4;
  }
}

}  // namespace dyadic
