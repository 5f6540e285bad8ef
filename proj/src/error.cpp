#include "actgov/error.hpp"

namespace actgov {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::kInfeasible: return "Infeasible";
    case ErrorKind::kUnboundedDirection: return "UnboundedDirection";
    case ErrorKind::kUnboundedPolytope: return "UnboundedPolytope";
    case ErrorKind::kEmptyPolytope: return "EmptyPolytope";
    case ErrorKind::kSingularMatrix: return "SingularMatrix";
    case ErrorKind::kOriginNotInU: return "OriginNotInU";
    case ErrorKind::kUnstableClosedLoop: return "UnstableClosedLoop";
    case ErrorKind::kSeedInadmissible: return "SeedInadmissible";
    case ErrorKind::kRiccatiDivergence: return "RiccatiDivergence";
    case ErrorKind::kNotStabilizable: return "NotStabilizable";
    case ErrorKind::kEmptySaturationRange: return "EmptySaturationRange";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kHashMismatch: return "HashMismatch";
  }
  return "Unknown";
}

}  // namespace actgov
