#include "actgov/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "actgov/error.hpp"

namespace actgov {

LinConstraintSet::LinConstraintSet(Mat a, Vec rhs)
    : A(std::move(a)), b(std::move(rhs)) {
  if (A.rows() != b.size()) {
    fail(ErrorKind::kDimensionMismatch,
         "constraint matrix has " + std::to_string(A.rows()) +
             " rows but offset vector has " + std::to_string(b.size()));
  }
}

void LinConstraintSet::add_row(const Vec& normal, double offset) {
  if (normal.size() != A.cols()) {
    fail(ErrorKind::kDimensionMismatch, "row normal has wrong length");
  }
  A.conservativeResize(A.rows() + 1, Eigen::NoChange);
  b.conservativeResize(b.size() + 1);
  A.row(A.rows() - 1) = normal.transpose();
  b(b.size() - 1) = offset;
}

double LinConstraintSet::max_violation(const Vec& z) const {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  return (A * z - b).maxCoeff();
}

void LinConstraintSet::validate() const {
  if (A.rows() != b.size()) {
    fail(ErrorKind::kDimensionMismatch, "constraint rows/offsets disagree");
  }
  if (A.cols() <= 0) {
    fail(ErrorKind::kDimensionMismatch, "constraint set has no dimension");
  }
  if (!A.allFinite() || !b.allFinite()) {
    fail(ErrorKind::kInvalidInput, "constraint data contains NaN or Inf");
  }
}

namespace {

constexpr double kPivotTol = 1e-10;

// Tableau of the dual standard-form problem
//   min h'y  s.t.  G'y = -c,  y >= 0
// with one artificial column per equality row. Columns [0, m) are the dual
// variables y (one per primal constraint), [m, m + d) the artificials.
struct DualTableau {
  Mat T;
  Vec rhs;
  std::vector<int> basis;
};

enum class SimplexOutcome { kOptimal, kUnbounded };

void pivot(DualTableau& tab, int row, int col) {
  const double p = tab.T(row, col);
  tab.T.row(row) /= p;
  tab.rhs(row) /= p;
  for (int i = 0; i < tab.T.rows(); ++i) {
    if (i == row) continue;
    const double f = tab.T(i, col);
    if (f == 0.0) continue;
    tab.T.row(i) -= f * tab.T.row(row);
    tab.rhs(i) -= f * tab.rhs(row);
  }
  tab.basis[row] = col;
}

Eigen::RowVectorXd basic_costs(const DualTableau& tab, const Vec& cost) {
  Eigen::RowVectorXd w(tab.basis.size());
  for (size_t i = 0; i < tab.basis.size(); ++i) w(i) = cost(tab.basis[i]);
  return w;
}

// Bland's rule: lowest-index entering column with negative reduced cost,
// lowest basis index among tied ratios. Only columns < n_enter may enter.
SimplexOutcome run_simplex(DualTableau& tab, const Vec& cost, int n_enter,
                           double opt_tol, int* pivots = nullptr) {
  if (pivots) *pivots = 0;
  const int rows = static_cast<int>(tab.T.rows());
  const int max_pivots = 200 * (static_cast<int>(tab.T.cols()) + rows) + 1000;
  for (int iter = 0; iter < max_pivots; ++iter) {
    const Eigen::RowVectorXd w = basic_costs(tab, cost);
    int enter = -1;
    for (int j = 0; j < n_enter; ++j) {
      const double r = cost(j) - w.dot(tab.T.col(j));
      if (r < -opt_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return SimplexOutcome::kOptimal;

    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      const double a = tab.T(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / a;
      if (leave < 0) {
        best = ratio;
        leave = i;
        continue;
      }
      const double tie = 1e-12 * std::max(1.0, std::abs(best));
      if (ratio < best - tie) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + tie && tab.basis[i] < tab.basis[leave]) {
        leave = i;
      }
    }
    if (leave < 0) return SimplexOutcome::kUnbounded;
    pivot(tab, leave, enter);
    if (pivots) ++*pivots;
  }
  fail(ErrorKind::kNumericalFailure, "simplex exceeded its pivot budget");
}

// Rebuilds the tableau from the original data for the current basis, which
// removes the error accumulated by repeated pivoting on small elements.
bool refactor(DualTableau& tab, const Mat& T0, const Vec& rhs0) {
  const int d = static_cast<int>(T0.rows());
  Mat basis_cols(d, d);
  for (int i = 0; i < d; ++i) basis_cols.col(i) = T0.col(tab.basis[i]);
  Eigen::FullPivLU<Mat> lu(basis_cols);
  if (lu.rank() < d) return false;
  tab.T = lu.solve(T0);
  tab.rhs = lu.solve(rhs0);
  return true;
}

// A point of {z : G z <= h}, found as the deepest point of the unit-normal
// rows capped at depth 1 and searched within a large box. With a zero cost the dual is fully degenerate and
// its multipliers are unreliable; this bounded problem is not.
SolveStatus feasible_point(const LinConstraintSet& cons);

bool primal_feasible(const LinConstraintSet& cons) { return feasible_point(cons).optimal(); }

// Unit-normal rows with near-parallel duplicates collapsed to the tightest.
// Pivoting on the tiny differences between such rows is what breaks the
// tableau; the two halfspaces only disagree far outside any region of use.
LinConstraintSet precondition(const LinConstraintSet& cons) {
  constexpr double kParallelTol = 1e-9;
  LinConstraintSet out(cons.dim());
  for (int i = 0; i < cons.rows(); ++i) {
    const double norm = cons.A.row(i).norm();
    if (norm == 0.0) {
      out.add_row(cons.A.row(i).transpose(), cons.b(i));
      continue;
    }
    const Vec a = cons.A.row(i).transpose() / norm;
    const double off = cons.b(i) / norm;
    bool merged = false;
    for (int j = 0; j < out.rows() && !merged; ++j) {
      if ((out.A.row(j).transpose() - a).cwiseAbs().maxCoeff() <= kParallelTol) {
        out.b(j) = std::min(out.b(j), off);
        merged = true;
      }
    }
    if (!merged) out.add_row(a, off);
  }
  return out;
}

SolveStatus solve_lp_boxed(const Vec& c, const LinConstraintSet& cons, double violation);

SolveStatus solve_lp_impl(const Vec& c, const LinConstraintSet& original, bool boxed = false) {
  const LinConstraintSet cons = precondition(original);
  const int d = cons.dim();
  const int m = cons.rows();
  const double h_scale = m > 0 ? std::max(1.0, cons.b.cwiseAbs().maxCoeff()) : 1.0;
  const double c_scale = std::max(1.0, c.cwiseAbs().maxCoeff());

  SolveStatus out;
  if (m > 0 && c.cwiseAbs().maxCoeff() == 0.0) {
    out = feasible_point(original);
    if (out.optimal()) out.value = 0.0;
    return out;
  }
  if (m == 0) {
    if (c.cwiseAbs().maxCoeff() <= kOptTol) {
      out.kind = SolveStatus::Kind::kOptimal;
      out.point = Vec::Zero(d);
      out.value = 0.0;
    } else {
      out.kind = SolveStatus::Kind::kUnbounded;
    }
    return out;
  }

  DualTableau tab;
  tab.T = Mat::Zero(d, m + d);
  tab.rhs = -c;
  tab.basis.resize(d);
  std::vector<double> sign(d, 1.0);
  tab.T.leftCols(m) = cons.A.transpose();
  for (int i = 0; i < d; ++i) {
    if (tab.rhs(i) < 0.0) {
      sign[i] = -1.0;
      tab.T.row(i).head(m) *= -1.0;
      tab.rhs(i) *= -1.0;
    }
    tab.T(i, m + i) = 1.0;
    tab.basis[i] = m + i;
  }

  const Mat T0 = tab.T;
  const Vec rhs0 = tab.rhs;

  // Phase 1: drive the artificials to zero.
  Vec phase1_cost = Vec::Zero(m + d);
  phase1_cost.tail(d).setOnes();
  run_simplex(tab, phase1_cost, m, kOptTol * c_scale);
  double infeas = 0.0;
  for (int i = 0; i < d; ++i) {
    if (tab.basis[i] >= m) infeas += std::abs(tab.rhs(i));
  }
  if (infeas > 1e-9 * c_scale) {
    // Dual infeasible: the primal is either unbounded or infeasible.
    out.kind = primal_feasible(cons) ? SolveStatus::Kind::kUnbounded
                                     : SolveStatus::Kind::kInfeasible;
    return out;
  }
  for (int i = 0; i < d; ++i) {
    if (tab.basis[i] < m) continue;
    int best = -1;
    for (int j = 0; j < m; ++j) {
      if (std::abs(tab.T(i, j)) > 1e-9 &&
          (best < 0 || std::abs(tab.T(i, j)) > std::abs(tab.T(i, best)))) {
        best = j;
      }
    }
    // No structural entry: the equality row is redundant (rank(G) < d).
    if (best >= 0) pivot(tab, i, best);
  }

  // Phase 2.
  Vec cost = Vec::Zero(m + d);
  cost.head(m) = cons.b;
  for (int round = 0;; ++round) {
    int pivots = 0;
    if (run_simplex(tab, cost, m, kOptTol * h_scale, &pivots) ==
        SimplexOutcome::kUnbounded) {
      out.kind = SolveStatus::Kind::kInfeasible;
      return out;
    }
    if ((round > 0 && pivots == 0) || round == 5 || !refactor(tab, T0, rhs0)) break;
  }

  // Simplex multipliers of the dual are the primal solution.
  const Eigen::RowVectorXd w = basic_costs(tab, cost);
  Vec z(d);
  for (int i = 0; i < d; ++i) z(i) = sign[i] * w.dot(tab.T.col(m + i));

  std::vector<int> active;
  for (int i = 0; i < d; ++i) {
    if (tab.basis[i] < m) active.push_back(tab.basis[i]);
  }
  if (static_cast<int>(active.size()) == d) {
    Mat GB(d, d);
    Vec hB(d);
    for (int i = 0; i < d; ++i) {
      GB.row(i) = cons.A.row(active[i]);
      hB(i) = cons.b(active[i]);
    }
    Eigen::FullPivLU<Mat> lu(GB);
    if (lu.rank() == d) {
      const Vec refined = lu.solve(hB);
      if (cons.max_violation(refined) <= cons.max_violation(z) + 1e-12 * h_scale) {
        z = refined;
      }
    }
  }

  double violation = 0.0;
  for (int i = 0; i < original.rows(); ++i) {
    const double norm = std::max(original.A.row(i).norm(), 1e-300);
    violation = std::max(violation, (original.A.row(i).dot(z) - original.b(i)) / norm);
  }
  if (violation > 1e-7 * h_scale) {
    // Typically a nearly unbounded problem whose rounding noise leaves a
    // far-away vertex; redo it inside the working box.
    if (!boxed) return solve_lp_boxed(c, original, violation);
    fail(ErrorKind::kNumericalFailure,
         "LP solution violates constraints by " + std::to_string(violation));
  }
  out.kind = SolveStatus::Kind::kOptimal;
  out.point = std::move(z);
  out.value = c.dot(out.point);
  return out;
}

SolveStatus solve_lp_boxed(const Vec& c, const LinConstraintSet& cons, double violation) {
  const int d = cons.dim();
  double h_scale = 1.0;
  for (int i = 0; i < cons.rows(); ++i) {
    const double norm = cons.A.row(i).norm();
    if (norm > 0.0) h_scale = std::max(h_scale, std::abs(cons.b(i)) / norm);
  }
  const double reach = 1e6 * h_scale;
  LinConstraintSet box = cons;
  for (int j = 0; j < d; ++j) {
    Vec row = Vec::Zero(d);
    row(j) = 1.0;
    box.add_row(row, reach);
    row(j) = -1.0;
    box.add_row(row, reach);
  }
  SolveStatus out = solve_lp_impl(c, box, true);
  if (!out.optimal()) return out;
  if (out.point.cwiseAbs().maxCoeff() >= 0.999 * reach) {
    out = SolveStatus{};
    out.kind = SolveStatus::Kind::kUnbounded;
    return out;
  }
  double v = 0.0;
  for (int i = 0; i < cons.rows(); ++i) {
    const double norm = std::max(cons.A.row(i).norm(), 1e-300);
    v = std::max(v, (cons.A.row(i).dot(out.point) - cons.b(i)) / norm);
  }
  if (v > 1e-7 * h_scale) {
    fail(ErrorKind::kNumericalFailure, "LP solution violates constraints by " +
                                           std::to_string(std::max(v, violation)));
  }
  return out;
}

SolveStatus feasible_point(const LinConstraintSet& cons) {
  const int d = cons.dim();
  const int m = cons.rows();
  LinConstraintSet slack(d + 1);
  double h_scale = 1.0;
  for (int i = 0; i < m; ++i) {
    const double norm = cons.A.row(i).norm();
    Vec row(d + 1);
    if (norm == 0.0) {
      row.setZero();
      row(d) = -1.0;
      slack.add_row(row, cons.b(i));
      continue;
    }
    row << cons.A.row(i).transpose() / norm, -1.0;
    slack.add_row(row, cons.b(i) / norm);
    h_scale = std::max(h_scale, std::abs(cons.b(i) / norm));
  }
  Vec cap = Vec::Zero(d + 1);
  cap(d) = -1.0;
  slack.add_row(cap, 1.0);
  // Points farther out than this are beyond any meaningful working scale;
  // the box keeps the optimal face bounded.
  const double reach = 1e6 * h_scale;
  for (int j = 0; j < d; ++j) {
    Vec row = Vec::Zero(d + 1);
    row(j) = 1.0;
    slack.add_row(row, reach);
    row(j) = -1.0;
    slack.add_row(row, reach);
  }
  Vec cost = Vec::Zero(d + 1);
  cost(d) = 1.0;
  const SolveStatus deep = solve_lp_impl(cost, slack, true);
  SolveStatus out;
  if (!deep.optimal()) {
    fail(ErrorKind::kNumericalFailure, "feasibility problem was not solved to optimality");
  }
  if (deep.point(d) > 1e-9 * h_scale) return out;
  out.kind = SolveStatus::Kind::kOptimal;
  out.point = deep.point.head(d);
  out.value = 0.0;
  return out;
}

}  // namespace

SolveStatus solve_lp(const Vec& c, const LinConstraintSet& cons) {
  cons.validate();
  if (c.size() != cons.dim()) {
    fail(ErrorKind::kDimensionMismatch, "LP cost vector length " +
                                            std::to_string(c.size()) +
                                            " != " +
                                            std::to_string(cons.dim()));
  }
  if (!c.allFinite()) fail(ErrorKind::kInvalidInput, "LP cost is not finite");
  return solve_lp_impl(c, cons);
}

SolveStatus solve_qp(const Mat& S, const Vec& target,
                     const LinConstraintSet& cons) {
  cons.validate();
  const int d = cons.dim();
  if (S.rows() != d || S.cols() != d || target.size() != d) {
    fail(ErrorKind::kDimensionMismatch, "QP weight/target shape mismatch");
  }
  if (!S.isApprox(S.transpose(), 1e-10)) {
    fail(ErrorKind::kNotPositiveDefinite, "QP weight is not symmetric");
  }
  Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::kNotPositiveDefinite, "QP weight is not positive definite");
  }

  SolveStatus out;
  Vec z;
  if (cons.rows() == 0 || cons.max_violation(target) <= 0.0) {
    z = target;
  } else {
    const SolveStatus start = solve_lp_impl(Vec::Zero(d), cons);
    if (!start.optimal()) {
      out.kind = SolveStatus::Kind::kInfeasible;
      return out;
    }
    z = start.point;

    // Primal active set on  min 1/2 p'Hp + g'p,  H = 2S.
    const Mat H = 2.0 * S;
    const int m = cons.rows();
    std::vector<int> working;
    std::vector<char> in_working(m, 0);
    const int max_iter = 50 * (m + d) + 100;
    // A constraint just released moves away from its face in exact
    // arithmetic; rounding must not let it block the very next step.
    int released = -1;
    bool done = false;
    for (int iter = 0; iter < max_iter && !done; ++iter) {
      const int w = static_cast<int>(working.size());
      Mat K = Mat::Zero(d + w, d + w);
      K.topLeftCorner(d, d) = H;
      for (int k = 0; k < w; ++k) {
        K.block(0, d + k, d, 1) = cons.A.row(working[k]).transpose();
        K.block(d + k, 0, 1, d) = cons.A.row(working[k]);
      }
      Vec rhs = Vec::Zero(d + w);
      rhs.head(d) = -H * (z - target);
      const Vec sol = K.fullPivLu().solve(rhs);
      const Vec p = sol.head(d);
      const Vec mu = sol.tail(w);

      // With d independent working rows z is a vertex and the exact step is
      // zero; ill-conditioned (near-parallel) rows would otherwise leave a
      // rounding residue that creeps along without blocking.
      bool vertex = false;
      if (w >= d) {
        Mat AW(w, d);
        for (int k = 0; k < w; ++k) AW.row(k) = cons.A.row(working[k]);
        vertex = AW.fullPivLu().rank() == d;
      }
      if (vertex || p.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + z.cwiseAbs().maxCoeff())) {
        int drop = -1;
        for (int k = 0; k < w; ++k) {
          if (mu(k) < -kOptTol &&
              (drop < 0 || working[k] < working[drop])) {
            drop = k;
          }
        }
        if (drop < 0) {
          done = true;
          break;
        }
        in_working[working[drop]] = 0;
        released = working[drop];
        working.erase(working.begin() + drop);
        continue;
      }

      double alpha = 1.0;
      int block = -1;
      const double p_norm = p.norm();
      for (int j = 0; j < m; ++j) {
        if (in_working[j] || j == released) continue;
        const double ap = cons.A.row(j).dot(p);
        if (ap <= 1e-12 * cons.A.row(j).norm() * p_norm) continue;
        const double slack = std::max(cons.b(j) - cons.A.row(j).dot(z), 0.0);
        const double step = slack / ap;
        if (step < alpha) {
          alpha = step;
          block = j;
        }
      }
      z += alpha * p;
      released = -1;
      if (block >= 0) {
        working.push_back(block);
        in_working[block] = 1;
      }
    }
    if (!done) {
      fail(ErrorKind::kNumericalFailure, "QP active-set iteration budget exhausted");
    }
  }
  out.kind = SolveStatus::Kind::kOptimal;
  const Vec diff = z - target;
  out.value = diff.dot(S * diff);
  out.point = std::move(z);
  return out;
}

double support(const LinConstraintSet& cons, const Vec& dir) {
  const SolveStatus r = solve_lp(-dir, cons);
  switch (r.kind) {
    case SolveStatus::Kind::kOptimal:
      return -r.value;
    case SolveStatus::Kind::kInfeasible:
      fail(ErrorKind::kInfeasible, "support function of an empty set");
    case SolveStatus::Kind::kUnbounded:
      break;
  }
  fail(ErrorKind::kUnboundedDirection, "set is unbounded in the query direction");
}

}  // namespace actgov
