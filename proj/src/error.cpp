#include "majorate/error.hpp"

namespace majorate {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotNormalised: return "NotNormalised";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IrrationalWeights: return "IrrationalWeights";
    case ErrorCode::ClassExplosion: return "ClassExplosion";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::MetricUnsupported: return "MetricUnsupported";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::UndefinedCase: return "UndefinedCase";
    case ErrorCode::ConverseInfidelityUnsupported: return "ConverseInfidelityUnsupported";
    case ErrorCode::InfeasibleAtZero: return "InfeasibleAtZero";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::OutOfExpansionRange: return "OutOfExpansionRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace majorate
