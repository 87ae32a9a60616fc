#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace interpbound {

enum class ErrorCode {
  // data errors
  MalformedHeader,
  NonFiniteValue,
  EmptyFile,
  DimensionMismatch,
  DuplicatePoints,
  InvalidArgument,
  IoFailure,
  // numerical failures
  NotPositiveDefinite,
  SingularSimplex,
  NearSingularSystem,
  AllInfeasible,
  ConvergenceFailure,
  UnsupportedDimension,
  NonFiniteLoss,
};

std::string_view error_code_name(ErrorCode code);

/// True for codes caused by the input data rather than by the numerics.
constexpr bool is_data_error(ErrorCode code) {
  return code <= ErrorCode::IoFailure;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace interpbound
