#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace actgov {

enum class ErrorKind {
  kDimensionMismatch,
  kInvalidInput,
  kNumericalFailure,
  kNotPositiveDefinite,
  kInfeasible,
  kUnboundedDirection,
  kUnboundedPolytope,
  kEmptyPolytope,
  kSingularMatrix,
  kOriginNotInU,
  kUnstableClosedLoop,
  kSeedInadmissible,
  kRiccatiDivergence,
  kNotStabilizable,
  kEmptySaturationRange,
  kParseError,
  kHashMismatch,
};

/// Stable identifier used in structured error lines, e.g. "SingularMatrix".
std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace actgov
