#pragma once

#include <Eigen/Dense>

namespace actgov {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Feasibility tolerance applied to every constraint row of an LP/QP optimum.
inline constexpr double kFeasTol = 1e-8;
/// Stationarity tolerance (reduced costs, Lagrange multipliers).
inline constexpr double kOptTol = 1e-9;

/// Halfspace collection {z : A z <= b}. A has one row per constraint and
/// `dim()` columns; an empty row set denotes the whole space.
struct LinConstraintSet {
  Mat A;
  Vec b;

  LinConstraintSet() = default;
  explicit LinConstraintSet(int dim) : A(0, dim), b(0) {}
  LinConstraintSet(Mat a, Vec rhs);

  int dim() const { return static_cast<int>(A.cols()); }
  int rows() const { return static_cast<int>(A.rows()); }

  void add_row(const Vec& normal, double offset);
  /// Largest violation max_i (A_i z - b_i), or -inf with no rows.
  double max_violation(const Vec& z) const;
  /// Throws InvalidInput on NaN/Inf and DimensionMismatch on shape errors.
  void validate() const;
};

struct SolveStatus {
  enum class Kind { kOptimal, kInfeasible, kUnbounded };

  Kind kind = Kind::kInfeasible;
  Vec point;  // set iff kOptimal
  double value = 0.0;

  bool optimal() const { return kind == Kind::kOptimal; }
};

/// Minimizes c.z over `cons`. Infeasible and unbounded problems are reported
/// through the status; DimensionMismatch and NumericalFailure are thrown.
SolveStatus solve_lp(const Vec& c, const LinConstraintSet& cons);

/// Minimizes (z - target)' S (z - target) over `cons` for symmetric
/// positive-definite S. The reported value is that weighted distance.
SolveStatus solve_qp(const Mat& S, const Vec& target,
                     const LinConstraintSet& cons);

/// max dir.z over `cons`. Throws Infeasible or UnboundedDirection.
double support(const LinConstraintSet& cons, const Vec& dir);

}  // namespace actgov
