#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "actgov/polytope.hpp"
#include "actgov/setcalc.hpp"
#include "actgov/system.hpp"

namespace actgov {

enum class GovernorMode { kMiqp, kBisect, kRgBaseline, kPassthrough };
enum class GovernStatus { kExact, kBisectApprox, kInfeasible };

const char* to_string(GovernorMode mode);
const char* to_string(GovernStatus status);
/// Throws ParseError on unknown names.
GovernorMode governor_mode_from_string(const std::string& name);

inline constexpr double kDefaultDeltaTol = 1e-4;

/// A successor is safe when it lies at least this normalized distance
/// outside the closure of every unsafe part (the optimizer targets the full
/// clearance, the safety test accepts half of it). Closures cover the seams
/// where adjacent open parts meet, which belong to the open unsafe set but
/// to no single part.
inline constexpr double kSafetyClearance = 1e-6;

/// Immutable description of the one-step supervision problem.
class GovernorProblem {
 public:
  /// Throws NotPositiveDefinite for a non-SPD weight and DimensionMismatch /
  /// UnboundedPolytope for inconsistent data.
  GovernorProblem(LinearSystem sys, Polytope U, Mat S, PolyUnion unsafe, GovernorMode mode);

  const LinearSystem& sys() const { return sys_; }
  const Polytope& U() const { return U_; }
  const Mat& S() const { return S_; }
  const PolyUnion& unsafe() const { return unsafe_; }
  GovernorMode mode() const { return mode_; }

  /// Successor keeps half the safety clearance from every unsafe part.
  bool successor_safe(const Vec& x, const Vec& u) const;

 private:
  LinearSystem sys_;
  Polytope U_;
  Mat S_;
  PolyUnion unsafe_;
  GovernorMode mode_;
};

struct GovernResult {
  Vec u;
  bool modified = false;
  GovernStatus status = GovernStatus::kExact;
  /// Lower bisection bound (bisect mode); 1 when unused.
  double lambda = 1.0;
  /// Branch-and-bound nodes (miqp mode) or bisection iterations.
  int nodes = 0;
  /// ||u - u_phi||_S^2.
  double objective = 0.0;
};

/// Maps (state, time index) to a control.
using SafeModePolicy = std::function<Vec(const Vec& x, int t)>;

/// Minimal S-weighted modification of u_phi such that u is in U and the
/// successor avoids every unsafe part, by branch-and-bound over the
/// one-violated-row disjunction of each part.
GovernResult govern_miqp(const GovernorProblem& prob, const Vec& x, const Vec& u_phi);

/// Bisection on the segment from u_psi (lambda = 0) to u_phi (lambda = 1).
GovernResult govern_bisect(const GovernorProblem& prob, const Vec& x, const Vec& u_phi,
                           const Vec& u_psi, double delta_tol = kDefaultDeltaTol);

/// Reference governor: v = v_prev + kappa (r - v_prev) with the largest
/// admissible kappa in [0, 1], found by bisection to `delta_tol` in v.
/// Throws SeedInadmissible when (x, v_prev) is outside O-infinity.
double rg_update(const OinfSet& oinf, const Vec& x, double r, double v_prev,
                 double delta_tol = kDefaultDeltaTol);

/// Whether the safe-mode control at (x, t) keeps the successor safe.
bool assumption1_audit(const SafeModePolicy& policy, const GovernorProblem& prob, const Vec& x,
                       int t);

/// Unsafe parts that the successor can reach with some u in U, paired with
/// their index in prob.unsafe(). Parts that cannot contain the successor in
/// their interior need no disjunction.
std::vector<std::pair<int, Polytope>> reachable_parts(const GovernorProblem& prob, const Vec& x);

/// Big-M encoding of the governor MIQP over (u, delta):
///   min (u - u_phi)' S (u - u_phi)
///   G_ij B u - M_ij delta_ij >= g_ij - G_ij A x - M_ij   for every row i of part j
///   sum_i delta_ij = 1                                 for every part j
///   H u <= h                                           (u in U)
/// M_ij = max(0, g_ij + box * ||G_ij||_1) + 1 makes a row vacuous whenever
/// the successor stays in the operating box.
struct BigMInstance {
  Mat S;
  Vec u_phi;
  struct Row {
    int part = 0;
    int row = 0;
    Vec gu;           // coefficient of u
    double big_m = 0;  // coefficient of -delta
    double rhs = 0;
  };
  std::vector<Row> rows;
  std::vector<int> part_sizes;
  Mat H;
  Vec h;
};

BigMInstance build_big_m(const GovernorProblem& prob, const Vec& x, const Vec& u_phi,
                         double box_half_width = kDefaultBoxHalfWidth);

/// CPLEX LP-format text of the instance (binaries declared, u free).
std::string export_miqp_lp(const BigMInstance& inst);

}  // namespace actgov
