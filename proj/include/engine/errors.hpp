#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace engine {

enum class ErrorCode {
  DimensionMismatch,
  NumericalFailure,
  RepairFailure,
  InvalidBelief,
  InvalidSpec,
  MissingBelief,
  InconsistentPartition,
  Infeasible,
  Unbounded,
  EmptyExchangePolyhedron,
  IncompatibleBudget,
  TraderPolyhedronInfeasible,
  LengthTooLong,
  NoTrials,
  ValidationError,
  NotFound,
  MissingInputs,
  StorageFailure,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the engine. `path` carries a field path for
// validation errors, the absent section for MissingInputs, or the failing
// row name for Infeasible.
class EngineError : public std::runtime_error {
 public:
  EngineError(ErrorCode code, std::string message, std::string path = {},
              std::vector<std::string> details = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::string path_;
  std::vector<std::string> details_;
};

// Process exit code for the CLI: 2 validation, 3 infeasible, 4 solver failure.
int exit_code_for(ErrorCode code);

}  // namespace engine
