#include "vizcap/error.hpp"

namespace vizcap {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kType: return "type";
    case ErrorCode::kSelection: return "selection";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kDegenerateFit: return "degenerate-fit";
    case ErrorCode::kDegenerateCorrelation: return "degenerate-correlation";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kScaling: return "scaling";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kBuild: return "build";
    case ErrorCode::kTierProtocol: return "tier-protocol";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kReplayMiss: return "replay-miss";
    case ErrorCode::kEmptyCompletion: return "empty-completion";
    case ErrorCode::kMode: return "mode";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kEmptyChart: return "empty-chart";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kConflict: return "conflict";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ParseError::ParseError(const std::string& message, std::size_t location)
    : Error(ErrorCode::kParse, message), location_(location) {}

bool IsGatewayError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAuth:
    case ErrorCode::kNetwork:
    case ErrorCode::kBackend:
    case ErrorCode::kReplayMiss:
    case ErrorCode::kEmptyCompletion:
      return true;
    default:
      return false;
  }
}

}  // namespace vizcap
