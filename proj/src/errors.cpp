#include "engine/errors.hpp"

namespace engine {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::RepairFailure: return "RepairFailure";
    case ErrorCode::InvalidBelief: return "InvalidBelief";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::MissingBelief: return "MissingBelief";
    case ErrorCode::InconsistentPartition: return "InconsistentPartition";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::EmptyExchangePolyhedron: return "EmptyExchangePolyhedron";
    case ErrorCode::IncompatibleBudget: return "IncompatibleBudget";
    case ErrorCode::TraderPolyhedronInfeasible: return "TraderPolyhedronInfeasible";
    case ErrorCode::LengthTooLong: return "LengthTooLong";
    case ErrorCode::NoTrials: return "NoTrials";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MissingInputs: return "MissingInputs";
    case ErrorCode::StorageFailure: return "StorageFailure";
  }
  return "Unknown";
}

EngineError::EngineError(ErrorCode code, std::string message, std::string path, std::vector<std::string> details)
    : std::runtime_error(std::move(message)), code_(code), path_(std::move(path)), details_(std::move(details)) {}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Infeasible:
    case ErrorCode::EmptyExchangePolyhedron:
    case ErrorCode::IncompatibleBudget:
    case ErrorCode::TraderPolyhedronInfeasible:
      return 3;
    case ErrorCode::NumericalFailure:
    case ErrorCode::RepairFailure:
    case ErrorCode::Unbounded:
    case ErrorCode::StorageFailure:
      return 4;
    default:
      return 2;
  }
}

}  // namespace engine
