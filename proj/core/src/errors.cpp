#include "ipwvar/errors.hpp"

namespace ipwvar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::DegenerateResponse: return "DegenerateResponse";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::KnownProbabilityMisuse: return "KnownProbabilityMisuse";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::MissingInRespondent: return "MissingInRespondent";
    case ErrorCode::MissingInResponseCovariate: return "MissingInResponseCovariate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace ipwvar
