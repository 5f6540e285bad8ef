#include "actgov/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "actgov/error.hpp"

namespace actgov {

namespace {

void check_stabilizable(const Mat& A, const Mat& B) {
  const int n = static_cast<int>(A.rows());
  Eigen::EigenSolver<Mat> es(A);
  const Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
  const Eigen::MatrixXcd Bc = B.cast<std::complex<double>>();
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0 - 1e-12) continue;
    Eigen::MatrixXcd pbh(n, n + B.cols());
    pbh << Ac - lambda * Eigen::MatrixXcd::Identity(n, n), Bc;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(pbh);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) {
      fail(ErrorKind::kNotStabilizable, "(A, B) is not stabilizable");
    }
  }
}

}  // namespace

Mat dlqr(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m ||
      R.cols() != m) {
    fail(ErrorKind::kDimensionMismatch, "LQR data has inconsistent shapes");
  }
  if (Eigen::LLT<Mat>(R).info() != Eigen::Success || !R.isApprox(R.transpose(), 1e-12)) {
    fail(ErrorKind::kNotPositiveDefinite, "LQR input weight R must be positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Mat> qe(0.5 * (Q + Q.transpose()));
  if (qe.eigenvalues().minCoeff() < -1e-12 || !Q.isApprox(Q.transpose(), 1e-12)) {
    fail(ErrorKind::kNotPositiveDefinite, "LQR state weight Q must be positive semidefinite");
  }
  check_stabilizable(A, B);

  Mat P = Q;
  for (int it = 0; it < 10000; ++it) {
    const Mat BtP = B.transpose() * P;
    const Mat gain = (R + BtP * B).ldlt().solve(BtP * A);
    Mat next = Q + A.transpose() * P * A - A.transpose() * P * B * gain;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) break;
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (change <= 1e-10 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
      const Mat BtPn = B.transpose() * P;
      return -(R + BtPn * B).ldlt().solve(BtPn * A);
    }
  }
  fail(ErrorKind::kRiccatiDivergence, "Riccati iteration did not converge in 10^4 steps");
}

const Vec& Reference::at(int k) const {
  if (breakpoints.empty()) fail(ErrorKind::kInvalidInput, "reference has no breakpoints");
  const Vec* value = &breakpoints.front().second;
  for (const auto& [k0, v] : breakpoints) {
    if (k0 <= k) value = &v;
  }
  return *value;
}

const char* to_string(PolicyKind kind) {
  return kind == PolicyKind::kAccLqr ? "acc_lqr" : "robot_lqr";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "acc_lqr") return PolicyKind::kAccLqr;
  if (name == "robot_lqr") return PolicyKind::kRobotLqr;
  fail(ErrorKind::kParseError, "unknown policy kind '" + name + "'");
}

void Scenario::validate() const {
  sys.validate();
  const int n = sys.n(), m = sys.m();
  if (X0.dim() != n) fail(ErrorKind::kDimensionMismatch, "exclusion set does not match the state");
  if (U.dim() != m) fail(ErrorKind::kDimensionMismatch, "control set does not match the input");
  if (S.rows() != m || S.cols() != m) fail(ErrorKind::kDimensionMismatch, "weight S must be m x m");
  if (policy.Q.rows() != n || policy.Q.cols() != n || policy.R.rows() != m ||
      policy.R.cols() != m) {
    fail(ErrorKind::kDimensionMismatch, "policy weights do not match the system");
  }
  if (sim.x0.size() != n) fail(ErrorKind::kDimensionMismatch, "initial state has the wrong size");
  if (sim.steps < 0) fail(ErrorKind::kInvalidInput, "steps must be non-negative");
  if (sim.reference.breakpoints.empty()) fail(ErrorKind::kInvalidInput, "reference is empty");
  const int want_ref = policy.kind == PolicyKind::kAccLqr ? 1 : 2;
  int last_k = -1;
  for (const auto& [k, v] : sim.reference.breakpoints) {
    if (v.size() != want_ref) fail(ErrorKind::kDimensionMismatch, "reference has the wrong size");
    if (k <= last_k) fail(ErrorKind::kInvalidInput, "reference breakpoints must increase");
    last_k = k;
  }
  if (sim.reference.breakpoints.front().first != 0) {
    fail(ErrorKind::kInvalidInput, "reference must start at k = 0");
  }
  if (policy.kind == PolicyKind::kAccLqr && n != 2) {
    fail(ErrorKind::kDimensionMismatch, "car-following policy needs a 2-state system");
  }
  if (policy.kind == PolicyKind::kRobotLqr && (n != 4 || m != 2)) {
    fail(ErrorKind::kDimensionMismatch, "robot policy needs a 4-state, 2-input system");
  }
  if (!(governor.delta_tol > 0.0 && governor.delta_tol < 1.0)) {
    fail(ErrorKind::kInvalidInput, "delta_tol must lie in (0, 1)");
  }
  if (governor.domain_half_width && !(*governor.domain_half_width > 0.0)) {
    fail(ErrorKind::kInvalidInput, "domain half-width must be positive");
  }
  if (!(policy.c_field >= 0.0 && policy.influence >= 0.0 && policy.vel_limit > 0.0 &&
        policy.acc_limit > 0.0)) {
    fail(ErrorKind::kInvalidInput, "policy parameters must be positive");
  }
}

std::optional<Polytope> Scenario::domain() const {
  if (!governor.domain_half_width) return std::nullopt;
  const double w = *governor.domain_half_width;
  return Polytope::box(Vec::Constant(sys.n(), -w), Vec::Constant(sys.n(), w));
}

Scenario acc_scenario(double M) {
  Scenario scn;
  scn.name = "acc";
  const double dt = 0.25;
  Mat A(2, 2), B(2, 1);
  A << 1, dt, 0, 1;
  B << -0.5 * dt * dt, -dt;
  scn.sys = {A, B, dt};
  Mat G(4, 2);
  G << 1, 0, -1, 0, 0, 1, 0, -1;
  Vec g(4);
  g << 2, M, M, M;
  scn.X0 = Polytope(G, g, std::vector<bool>(4, true));
  scn.U = Polytope::box(Vec::Constant(1, -2), Vec::Constant(1, 2));
  scn.S = Mat::Identity(1, 1);
  scn.governor.mode = GovernorMode::kMiqp;
  scn.governor.kprime = -1;
  scn.governor.domain_half_width = M;
  scn.policy.kind = PolicyKind::kAccLqr;
  scn.policy.Q = Mat::Zero(2, 2);
  scn.policy.Q.diagonal() << 10, 1;
  scn.policy.R = Mat::Constant(1, 1, 20);
  Vec x0(2);
  x0 << 18, -4;
  scn.sim.x0 = x0;
  scn.sim.steps = 200;
  scn.sim.reference = Reference::constant(Vec::Constant(1, 2.5));
  return scn;
}

Vec default_diamond_center() {
  Vec c(2);
  c << 0.0, 0.5;
  return c;
}

Scenario robot_scenario(const Vec& diamond_center, double speed_extent) {
  if (diamond_center.size() != 2) {
    fail(ErrorKind::kDimensionMismatch, "diamond center must be a 2-vector");
  }
  if (!(speed_extent > 0.0)) fail(ErrorKind::kInvalidInput, "speed extent must be positive");
  Scenario scn;
  scn.name = "robot";
  const double dt = 1.0;
  const Mat I2 = Mat::Identity(2, 2);
  Mat A = Mat::Identity(4, 4);
  A.topRightCorner(2, 2) = dt * I2;
  Mat B(4, 2);
  B << 0.5 * dt * dt * I2, dt * I2;
  scn.sys = {A, B, dt};
  // |s1 - c1| + 2 |s2 - c2| < 4 and |ds_i| < speed_extent.
  Mat G = Mat::Zero(8, 4);
  Vec g(8);
  int r = 0;
  for (double a : {1.0, -1.0}) {
    for (double b : {2.0, -2.0}) {
      G(r, 0) = a;
      G(r, 1) = b;
      g(r) = 4.0 + a * diamond_center(0) + b * diamond_center(1);
      ++r;
    }
  }
  for (int i = 0; i < 2; ++i) {
    G(r, 2 + i) = 1;
    g(r++) = speed_extent;
    G(r, 2 + i) = -1;
    g(r++) = speed_extent;
  }
  scn.X0 = Polytope(G, g, std::vector<bool>(8, true));
  scn.U = Polytope::box(Vec::Constant(2, -2), Vec::Constant(2, 2));
  scn.S = I2;
  scn.governor.mode = GovernorMode::kBisect;
  scn.governor.kprime = 3;
  scn.policy.kind = PolicyKind::kRobotLqr;
  scn.policy.Q = Mat::Identity(4, 4);
  scn.policy.R = I2;
  Vec x0 = Vec::Zero(4);
  x0(0) = -10;
  scn.sim.x0 = x0;
  scn.sim.steps = 60;
  Vec target(2);
  target << 10, 0;
  scn.sim.reference = Reference::constant(target);
  return scn;
}

Vec acc_nominal(const Vec& x, double ds_ref, const Mat& K) {
  Vec e(2);
  e << x(0) - ds_ref, x(1);
  return K * e;
}

std::pair<double, double> robot_saturation_range(double velocity, double dt, double vel_limit,
                                                 double acc_limit) {
  const double lo = std::max(-acc_limit, -(vel_limit + velocity) / dt);
  const double hi = std::min(acc_limit, (vel_limit - velocity) / dt);
  if (lo > hi) {
    fail(ErrorKind::kEmptySaturationRange,
         "velocity " + std::to_string(velocity) + " leaves no admissible acceleration");
  }
  return {lo, hi};
}

Vec robot_nominal(const Vec& x, const Vec& target, const Mat& K, double dt, double vel_limit,
                  double acc_limit) {
  if (x.size() != 4 || target.size() != 2 || K.rows() != 2 || K.cols() != 4) {
    fail(ErrorKind::kDimensionMismatch, "robot policy expects a 4-state, 2-input model");
  }
  if (!(dt > 0.0)) fail(ErrorKind::kInvalidInput, "sampling period must be positive");
  Vec e = x;
  e.head(2) -= target;
  const Vec raw = K * e;
  Vec u(2);
  for (int i = 0; i < 2; ++i) {
    const auto [lo, hi] = robot_saturation_range(x(2 + i), dt, vel_limit, acc_limit);
    u(i) = std::clamp(raw(i), lo, hi);
  }
  return u;
}

Vec robot_safemode(const Vec& x, const RepulsiveField& field) {
  const Vec p = x.head(2);
  const Polytope& obs = field.obstacle;
  const SolveStatus proj = solve_qp(Mat::Identity(2, 2), p, obs.cons());
  if (!proj.optimal()) fail(ErrorKind::kEmptyPolytope, "obstacle is empty");
  const Vec away = p - proj.point;
  const double dist = away.norm();
  if (dist > field.influence) return Vec::Zero(2);
  Vec dir;
  if (dist > 1e-9) {
    dir = away / dist;
  } else {
    // On or inside the obstacle: the nearest face, lowest index on ties.
    int best = 0;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < obs.rows(); ++i) {
      const double norm = obs.A().row(i).norm();
      if (norm < 1e-12) continue;
      const double gap = (obs.A().row(i).dot(p) - obs.b()(i)) / norm;
      if (gap > best_gap + 1e-12) {
        best_gap = gap;
        best = i;
      }
    }
    dir = obs.A().row(best).transpose().normalized();
  }
  Vec u = field.c_field * dir;
  for (int i = 0; i < 2; ++i) u(i) = std::clamp(u(i), -field.acc_limit, field.acc_limit);
  return u;
}

Polytope robot_obstacle(const Scenario& scn) {
  Polytope obs(2);
  for (int i = 0; i < scn.X0.rows(); ++i) {
    const auto row = scn.X0.A().row(i);
    if (row.tail(scn.sys.n() - 2).cwiseAbs().maxCoeff() == 0.0) {
      obs.add_row(row.head(2).transpose(), scn.X0.b()(i), scn.X0.strict(i));
    }
  }
  if (obs.rows() == 0) fail(ErrorKind::kInvalidInput, "exclusion set has no position-only rows");
  return obs;
}

Mat policy_gain(const Scenario& scn) {
  return dlqr(scn.sys.A, scn.sys.B, scn.policy.Q, scn.policy.R);
}

RgModel acc_rg_model(const Scenario& scn) {
  if (scn.policy.kind != PolicyKind::kAccLqr) {
    fail(ErrorKind::kInvalidInput, "the reference-governor baseline needs the car-following policy");
  }
  RgModel rg;
  rg.K = policy_gain(scn);
  const double k1 = rg.K(0, 0), k2 = rg.K(0, 1);
  // u = K x - K(1) v:  x+ = (A + B K) x - B K(1) v.
  rg.Acl = scn.sys.A + scn.sys.B * rg.K;
  rg.Bcl = -scn.sys.B * k1;
  const double M = scn.governor.domain_half_width.value_or(kDefaultBoxHalfWidth);
  const double umax = support(scn.U.cons(), Vec::Constant(1, 1.0));
  const double umin = -support(scn.U.cons(), Vec::Constant(1, -1.0));
  const double ds_min = scn.X0.b()(0);
  Mat H(6, 3);
  H << -1, 0, 0,    //
      k1, k2, -k1,  //
      -k1, -k2, k1, //
      1, 0, 0,      //
      0, 1, 0,      //
      0, -1, 0;
  Vec h(6);
  h << -ds_min, umax, -umin, M, M, M;
  rg.rows = LinConstraintSet(H, h);
  return rg;
}

GovernorProblem make_governor_problem(const Scenario& scn, const UnrecoverableSeq& seq) {
  return GovernorProblem(scn.sys, scn.U, scn.S, seq.at(scn.governor.kprime), scn.governor.mode);
}

UnrecoverableSeq scenario_sets(const Scenario& scn, int k_max, const StepObserver& observer) {
  scn.validate();
  return compute_unrecoverable(scn.X0, scn.sys, scn.U, k_max, observer, scn.domain());
}

}  // namespace actgov
