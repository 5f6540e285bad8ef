#include "actgov/setcalc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "actgov/error.hpp"

namespace actgov {

void LinearSystem::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    fail(ErrorKind::kDimensionMismatch, "state matrix must be square and nonempty");
  }
  if (B.rows() != A.rows() || B.cols() == 0) {
    fail(ErrorKind::kDimensionMismatch, "input matrix rows must match the state dimension");
  }
  if (!A.allFinite() || !B.allFinite() || !std::isfinite(dt) || dt <= 0.0) {
    fail(ErrorKind::kInvalidInput, "system data must be finite with dt > 0");
  }
}

const PolyUnion& UnrecoverableSeq::at(int kprime) const {
  if (kprime < 0 || kprime >= static_cast<int>(sets.size())) return sets.back();
  return sets[kprime];
}

bool OinfSet::contains(const Vec& x, const Vec& v) const {
  Vec z(x.size() + v.size());
  z << x, v;
  return cons.contains(z, Strictness::kClosure);
}

namespace {

PolyUnion step_parts(const PolyUnion& X_prev, const Polytope& X0, const LinearSystem& sys,
                     const Polytope& U, const std::optional<Polytope>& domain) {
  sys.validate();
  if (X0.dim() != sys.n() || X_prev.dim() != sys.n() || U.dim() != sys.m()) {
    fail(ErrorKind::kDimensionMismatch, "set dimensions do not match the system");
  }
  const Polytope BU = linear_image(sys.B, U);
  const PolyUnion shrunk = union_pdiff(X_prev, BU);
  PolyUnion next(sys.n());
  next.add(X0);
  next.append(affine_preimage(sys.A, shrunk));
  return domain ? intersect(next, *domain) : next;
}

}  // namespace

PolyUnion step_unrecoverable(const PolyUnion& X_prev, const Polytope& X0,
                             const LinearSystem& sys, const Polytope& U,
                             const std::optional<Polytope>& domain) {
  return simplify(step_parts(X_prev, X0, sys, U, domain));
}

UnrecoverableSeq compute_unrecoverable(const Polytope& X0, const LinearSystem& sys,
                                       const Polytope& U, int k_max,
                                       const StepObserver& observer,
                                       const std::optional<Polytope>& domain) {
  if (k_max < 1) fail(ErrorKind::kInvalidInput, "k_max must be at least 1");
  UnrecoverableSeq seq;
  PolyUnion first(sys.n());
  if (X0.has_interior()) first.add(X0);
  if (domain) first = intersect(first, *domain);
  seq.sets.push_back(first);
  if (observer) observer(0, seq.sets.back());
  for (int k = 1; k <= k_max; ++k) {
    // X_{k-1} is a subset of X_k in exact arithmetic; carrying it along keeps
    // the chain monotone when rounding shaves slivers off the new parts.
    PolyUnion next = step_parts(seq.sets.back(), X0, sys, U, domain);
    next.append(seq.sets.back());
    next = simplify(next);
    if (seq.sets.back().empty() && next.empty()) {
      seq.sets.push_back(std::move(next));
      seq.converged = true;
      seq.K = k;
      if (observer) observer(k, seq.sets.back());
      return seq;
    }
    // X_{k-1} is contained in X_k by construction, so one inclusion suffices.
    const bool same = is_subset(next, seq.sets.back());
    seq.sets.push_back(std::move(next));
    seq.K = k;
    if (observer) observer(k, seq.sets.back());
    if (same) {
      seq.converged = true;
      return seq;
    }
  }
  return seq;
}

ReachSet reach_trunc(const LinearSystem& sys, const Polytope& U, int horizon) {
  sys.validate();
  if (horizon < 0) fail(ErrorKind::kInvalidInput, "reach horizon must be non-negative");
  if (!U.contains(Vec::Zero(U.dim()), Strictness::kClosure)) {
    fail(ErrorKind::kOriginNotInU, "reach set requires 0 in U");
  }
  Mat AkB = sys.B;
  ReachSet out{linear_image(AkB, U), 0};
  for (int k = 1; k <= horizon; ++k) {
    AkB = sys.A * AkB;
    out.R_trunc = canonicalize(minkowski_sum(out.R_trunc, linear_image(AkB, U))).first;
    out.horizon = k;
  }
  return out;
}

Prop5Verdict check_prop5(const ReachSet& R, const UnrecoverableSeq& seq, int kprime) {
  Prop5Verdict v;
  v.not_converged = !seq.converged;
  const PolyUnion gap = region_diff(seq.last(), seq.at(kprime));
  v.holds = intersect(gap, R.R_trunc).empty();
  return v;
}

OinfSet compute_oinf(const Mat& Acl, const Mat& Bcl, const LinConstraintSet& rows,
                     int t_max) {
  const int n = static_cast<int>(Acl.rows());
  if (Acl.cols() != n || Bcl.rows() != n) {
    fail(ErrorKind::kDimensionMismatch, "closed-loop matrices are inconsistent");
  }
  const int p = static_cast<int>(Bcl.cols());
  if (rows.rows() > 0 && rows.dim() != n + p) {
    fail(ErrorKind::kDimensionMismatch, "O-infinity rows must act on (x, v)");
  }
  Eigen::EigenSolver<Mat> es(Acl);
  if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) {
    fail(ErrorKind::kUnstableClosedLoop, "closed-loop matrix is not Schur stable");
  }

  OinfSet out;
  out.n_state = n;
  out.cons = Polytope(n + p);
  if (rows.rows() == 0) {
    out.determined = true;
    return out;
  }
  const Mat Hx = rows.A.leftCols(n);
  const Mat Hv = rows.A.rightCols(p);

  // Steady-state rows, tightened by a small margin for finite determination.
  const Mat ss_gain = (Mat::Identity(n, n) - Acl).lu().solve(Bcl);
  for (int i = 0; i < rows.rows(); ++i) {
    Vec row = Vec::Zero(n + p);
    row.tail(p) = (Hx.row(i) * ss_gain + Hv.row(i)).transpose();
    out.cons.add_row(row, rows.b(i) - kSteadyStateMargin);
  }
  for (int i = 0; i < rows.rows(); ++i) {
    out.cons.add_row(rows.A.row(i).transpose(), rows.b(i));
  }

  // x_t = Acl^t x + G_t v with G_t = sum_{i<t} Acl^i Bcl.
  Mat At = Mat::Identity(n, n);
  Mat Gt = Mat::Zero(n, p);
  for (int t = 1; t <= t_max; ++t) {
    Gt = Acl * Gt + Bcl;
    At = Acl * At;
    bool all_redundant = true;
    std::vector<std::pair<Vec, double>> fresh;
    for (int i = 0; i < rows.rows(); ++i) {
      Vec row(n + p);
      row.head(n) = (Hx.row(i) * At).transpose();
      row.tail(p) = (Hx.row(i) * Gt + Hv.row(i)).transpose();
      const SolveStatus r = solve_lp(-row, out.cons.cons());
      if (r.optimal() && -r.value <= rows.b(i) + 1e-9 * std::max(1.0, std::abs(rows.b(i)))) {
        continue;
      }
      all_redundant = false;
      fresh.emplace_back(std::move(row), rows.b(i));
    }
    if (all_redundant) {
      out.determined = true;
      out.steps = t;
      out.cons = canonicalize(out.cons).first;
      return out;
    }
    for (auto& [row, off] : fresh) out.cons.add_row(row, off);
    out.steps = t;
  }
  out.cons = canonicalize(out.cons).first;
  return out;
}

namespace {

bool every_sequence_hits(const Vec& x, int remaining, const std::vector<Vec>& u_grid,
                         const Polytope& X0, const LinearSystem& sys) {
  if (X0.contains(x, Strictness::kRespect)) return true;
  if (remaining == 0) return false;
  for (const Vec& u : u_grid) {
    if (!every_sequence_hits(sys.step(x, u), remaining - 1, u_grid, X0, sys)) return false;
  }
  return true;
}

}  // namespace

bool oracle_unrecoverable(const Vec& x0, int depth, const std::vector<Vec>& u_grid,
                          const Polytope& X0, const LinearSystem& sys) {
  if (depth < 0) fail(ErrorKind::kInvalidInput, "oracle depth must be non-negative");
  return every_sequence_hits(x0, depth, u_grid, X0, sys);
}

std::vector<Vec> control_grid(const Polytope& U, int per_dim) {
  const int m = U.dim();
  if (per_dim < 1) fail(ErrorKind::kInvalidInput, "grid needs at least one point per axis");
  Vec lo(m), hi(m);
  for (int k = 0; k < m; ++k) {
    hi(k) = support(U.cons(), Vec::Unit(m, k));
    lo(k) = -support(U.cons(), -Vec::Unit(m, k));
  }
  std::vector<Vec> out;
  std::vector<int> idx(m, 0);
  while (true) {
    Vec u(m);
    for (int k = 0; k < m; ++k) {
      u(k) = per_dim == 1 ? 0.5 * (lo(k) + hi(k))
                          : lo(k) + (hi(k) - lo(k)) * idx[k] / (per_dim - 1);
    }
    if (U.contains(u, Strictness::kClosure)) out.push_back(u);
    int k = 0;
    while (k < m && ++idx[k] == per_dim) idx[k++] = 0;
    if (k == m) break;
  }
  return out;
}

}  // namespace actgov
