#include "interpbound/error.hpp"

namespace interpbound {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularSimplex: return "SingularSimplex";
    case ErrorCode::NearSingularSystem: return "NearSingularSystem";
    case ErrorCode::AllInfeasible: return "AllInfeasible";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

}  // namespace interpbound
