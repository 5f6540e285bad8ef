#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actgov/governor.hpp"
#include "actgov/polytope.hpp"
#include "actgov/setcalc.hpp"
#include "actgov/system.hpp"

namespace actgov {

/// LQR gain for u = K x (A + B K is Schur) from the discrete Riccati
/// iteration. Throws NotStabilizable, RiccatiDivergence, NotPositiveDefinite.
Mat dlqr(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

/// Piecewise-constant reference: value of the last breakpoint with k_i <= k.
struct Reference {
  std::vector<std::pair<int, Vec>> breakpoints;

  static Reference constant(const Vec& value) { return {{{0, value}}}; }
  const Vec& at(int k) const;
  int dim() const { return breakpoints.empty() ? 0 : static_cast<int>(breakpoints[0].second.size()); }
};

enum class PolicyKind { kAccLqr, kRobotLqr };
const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kAccLqr;
  Mat Q;
  Mat R;
  // Robot parameters.
  double c_field = 2.0;    // repulsive magnitude
  double influence = 3.0;  // field is zero farther than this from the obstacle
  double vel_limit = 4.0;
  double acc_limit = 2.0;
};

struct GovernorConfig {
  GovernorMode mode = GovernorMode::kMiqp;
  /// Index of the unrecoverable set used online; negative selects the last.
  int kprime = -1;
  double delta_tol = kDefaultDeltaTol;
  /// Half-width of the operating box that clips X_k; absent means no clip.
  std::optional<double> domain_half_width;
};

struct SimConfig {
  Vec x0;
  int steps = 0;
  Reference reference;
};

struct Scenario {
  std::string name;
  LinearSystem sys;
  Polytope X0;
  Polytope U;
  Mat S;
  GovernorConfig governor;
  PolicyConfig policy;
  SimConfig sim;

  /// Throws DimensionMismatch / InvalidInput on inconsistent data.
  void validate() const;
  std::optional<Polytope> domain() const;
};

/// Adaptive cruise control of the car-following example. M is the virtual
/// bound on |gap error| and |relative speed|.
Scenario acc_scenario(double M = kDefaultBoxHalfWidth);
/// Omni-directional robot avoiding a diamond obstacle
/// |s1 - c1| + 2 |s2 - c2| < 4. The exclusion set bounds the velocities by
/// `speed_extent`, which must exceed the speed limit the policies enforce so
/// that every reachable velocity is covered.
inline constexpr double kRobotSpeedExtent = 8.0;
Vec default_diamond_center();
Scenario robot_scenario(const Vec& diamond_center = default_diamond_center(),
                        double speed_extent = kRobotSpeedExtent);

/// u = K (ds - ds_ref, dv).
Vec acc_nominal(const Vec& x, double ds_ref, const Mat& K);

/// Velocity-safe acceleration range R_i = [max(-a, -(v + ds_i)/dt), min(a, (v - ds_i)/dt)].
/// Throws EmptySaturationRange when it is empty.
std::pair<double, double> robot_saturation_range(double velocity, double dt, double vel_limit,
                                                 double acc_limit);

/// Saturated LQR tracking of (s1_r, s2_r).
Vec robot_nominal(const Vec& x, const Vec& target, const Mat& K, double dt, double vel_limit = 4.0,
                  double acc_limit = 2.0);

struct RepulsiveField {
  Polytope obstacle;  // in position space
  double c_field = 2.0;
  double influence = 3.0;
  double acc_limit = 2.0;
};

/// Unit direction away from the nearest obstacle point times c_field,
/// saturated to [-acc_limit, acc_limit]; zero outside the influence region.
Vec robot_safemode(const Vec& x, const RepulsiveField& field);

/// Position-space obstacle: the exclusion rows that do not involve velocity.
Polytope robot_obstacle(const Scenario& scn);

/// Closed-loop data and O-infinity rows of the reference-governor baseline
/// (car-following scenario only).
struct RgModel {
  Mat K;
  Mat Acl;
  Mat Bcl;
  LinConstraintSet rows;
};
RgModel acc_rg_model(const Scenario& scn);

/// Controller gain of the scenario's policy.
Mat policy_gain(const Scenario& scn);

/// Governor problem against X_{k'} of `seq`.
GovernorProblem make_governor_problem(const Scenario& scn, const UnrecoverableSeq& seq);

/// Unrecoverable sets for the scenario (clipped to its operating domain).
UnrecoverableSeq scenario_sets(const Scenario& scn, int k_max = kDefaultKMax,
                               const StepObserver& observer = {});

}  // namespace actgov
