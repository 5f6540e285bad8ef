#include "actgov/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "actgov/error.hpp"

namespace actgov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec project_onto(const Polytope& U, const Mat& S, const Vec& u) {
  if (U.contains(u, Strictness::kClosure)) return u;
  const SolveStatus proj = solve_qp(S, u, U.cons());
  if (!proj.optimal()) fail(ErrorKind::kEmptyPolytope, "control set is empty");
  return proj.point;
}

struct RgState {
  OinfSet oinf;
  Mat K;
  double v = 0.0;
};

}  // namespace

int Trajectory::assumption1_violations() const {
  return static_cast<int>(
      std::count_if(records.begin(), records.end(), [](const StepRecord& r) { return r.audit == 0; }));
}

SafeModePolicy scenario_safemode(const Scenario& scn) {
  if (scn.policy.kind == PolicyKind::kRobotLqr) {
    RepulsiveField field{robot_obstacle(scn), scn.policy.c_field, scn.policy.influence,
                         scn.policy.acc_limit};
    const double dt = scn.sys.dt;
    const double vel = scn.policy.vel_limit;
    const double acc = scn.policy.acc_limit;
    return [field, dt, vel, acc](const Vec& x, int) {
      Vec u = robot_safemode(x, field);
      // Keep the velocity bound as well.
      for (int i = 0; i < 2; ++i) {
        const auto [lo, hi] = robot_saturation_range(x(2 + i), dt, vel, acc);
        u(i) = std::clamp(u(i), lo, hi);
      }
      return u;
    };
  }
  const double brake = -support(scn.U.cons(), Vec::Constant(1, -1.0));
  return [brake](const Vec&, int) { return Vec::Constant(1, brake); };
}

Vec scenario_nominal(const Scenario& scn, const Mat& K, const Vec& x, int k) {
  const Vec& r = scn.sim.reference.at(k);
  if (scn.policy.kind == PolicyKind::kAccLqr) return acc_nominal(x, r(0), K);
  return robot_nominal(x, r, K, scn.sys.dt, scn.policy.vel_limit, scn.policy.acc_limit);
}

std::optional<std::pair<double, double>> oinf_reference_range(const OinfSet& oinf, const Vec& x) {
  const int n = oinf.n_state;
  if (x.size() != n || oinf.cons.dim() != n + 1) {
    fail(ErrorKind::kDimensionMismatch, "state size does not match O-infinity");
  }
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const Mat& H = oinf.cons.A();
  const Vec& h = oinf.cons.b();
  for (int i = 0; i < H.rows(); ++i) {
    const double a = H(i, n);
    const double rhs = h(i) - H.row(i).head(n).dot(x);
    const double scale = std::max(1.0, H.row(i).norm());
    if (std::abs(a) <= 1e-12 * scale) {
      if (rhs < -1e-9 * scale) return std::nullopt;
    } else if (a > 0) {
      hi = std::min(hi, rhs / a);
    } else {
      lo = std::max(lo, rhs / a);
    }
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

Trajectory simulate(const Scenario& scn, const GovernorProblem& prob) {
  scn.validate();
  const LinearSystem& sys = scn.sys;
  if (prob.sys().n() != sys.n() || prob.sys().m() != sys.m()) {
    fail(ErrorKind::kDimensionMismatch, "governor problem does not match the scenario");
  }
  const Mat K = policy_gain(scn);
  const GovernorMode mode = prob.mode();
  const SafeModePolicy safemode = scenario_safemode(scn);

  Trajectory traj;
  std::optional<RgState> rg;
  if (mode == GovernorMode::kRgBaseline) {
    const RgModel model = acc_rg_model(scn);
    rg = RgState{compute_oinf(model.Acl, model.Bcl, model.rows), model.K, 0.0};
  }

  Vec x = scn.sim.x0;
  for (int k = 0; k <= scn.sim.steps; ++k) {
    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.u_nominal = scenario_nominal(scn, K, x, k);
    rec.rg_reference = kNaN;
    const auto t0 = std::chrono::steady_clock::now();

    if (k == 0 && mode != GovernorMode::kPassthrough && mode != GovernorMode::kRgBaseline &&
        contains(prob.unsafe(), x, Strictness::kInterior).inside) {
      rec.u_applied = rec.u_nominal;
      rec.status = GovernStatus::kInfeasible;
      traj.records.push_back(std::move(rec));
      traj.halted = true;
      traj.halt_reason = "initial state lies in the unrecoverable set";
      break;
    }

    switch (mode) {
      case GovernorMode::kPassthrough: {
        rec.u_applied = project_onto(scn.U, scn.S, rec.u_nominal);
        rec.modified = rec.u_applied != rec.u_nominal;
        break;
      }
      case GovernorMode::kMiqp: {
        const GovernResult res = govern_miqp(prob, x, rec.u_nominal);
        rec.u_applied = res.u;
        rec.modified = res.modified;
        rec.status = res.status;
        rec.nodes = res.nodes;
        break;
      }
      case GovernorMode::kBisect: {
        const Vec u_phi = project_onto(scn.U, scn.S, rec.u_nominal);
        const Vec u_psi = safemode(x, k);
        rec.audit = assumption1_audit(safemode, prob, x, k) ? 1 : 0;
        const GovernResult res =
            govern_bisect(prob, x, u_phi, u_psi, scn.governor.delta_tol);
        rec.u_applied = res.u;
        rec.modified = res.modified || u_phi != rec.u_nominal;
        rec.lambda = res.lambda;
        rec.status = res.status;
        rec.nodes = res.nodes;
        break;
      }
      case GovernorMode::kRgBaseline: {
        const double r = scn.sim.reference.at(k)(0);
        if (k == 0) {
          const auto range = oinf_reference_range(rg->oinf, x);
          if (!range) {
            rec.u_applied = rec.u_nominal;
            rec.status = GovernStatus::kInfeasible;
            traj.records.push_back(std::move(rec));
            traj.halted = true;
            traj.halt_reason = "no admissible reference at the initial state";
            return traj;
          }
          rg->v = std::clamp(r, range->first, range->second);
        } else {
          rg->v = rg_update(rg->oinf, x, r, rg->v, scn.governor.delta_tol);
        }
        rec.rg_reference = rg->v;
        rec.u_applied = acc_nominal(x, rg->v, rg->K);
        rec.modified = rg->v != r;
        break;
      }
    }
    traj.online_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool stop = rec.status == GovernStatus::kInfeasible;
    const Vec u = rec.u_applied;
    traj.records.push_back(std::move(rec));
    if (stop) {
      traj.halted = true;
      traj.halt_reason = "governor found no safe control at k = " + std::to_string(k);
      break;
    }
    if (k < scn.sim.steps) x = sys.step(x, u);
  }
  return traj;
}

}  // namespace actgov
