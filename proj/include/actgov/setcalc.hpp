#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "actgov/polytope.hpp"
#include "actgov/system.hpp"

namespace actgov {

/// Unrecoverable sets X_0 ... X_K. The safe set is the complement of the
/// last element.
struct UnrecoverableSeq {
  std::vector<PolyUnion> sets;
  bool converged = false;
  int K = 0;

  const PolyUnion& last() const { return sets.back(); }
  /// X_{k'} with k' clamped to K; negative k' selects the last set.
  const PolyUnion& at(int kprime) const;
};

/// Finite truncation of the reach set  sum_{k=0}^{horizon} A^k B U.
struct ReachSet {
  Polytope R_trunc;
  int horizon = 0;
};

/// Maximal output-admissible set of the frozen-reference closed loop, over
/// stacked (state, reference) vectors.
struct OinfSet {
  Polytope cons;
  bool determined = false;
  int n_state = 0;
  int steps = 0;

  bool contains(const Vec& x, const Vec& v) const;
};

struct Prop5Verdict {
  bool holds = false;
  /// The unrecoverable sequence had not converged; X_K stands in for X_inf.
  bool not_converged = false;
  /// R was truncated, so `holds` is necessary but not sufficient evidence.
  bool truncated = true;
};

inline constexpr int kDefaultKMax = 50;
inline constexpr int kDefaultReachHorizon = 20;
inline constexpr double kSteadyStateMargin = 1e-6;

/// X_k = X_0 union A^-1 (X_{k-1} ~ B U), simplified. When `domain` is given
/// every part is clipped to it (the operating region of the computation).
PolyUnion step_unrecoverable(const PolyUnion& X_prev, const Polytope& X0,
                             const LinearSystem& sys, const Polytope& U,
                             const std::optional<Polytope>& domain = std::nullopt);

using StepObserver = std::function<void(int k, const PolyUnion& X_k)>;

/// Iterates step_unrecoverable until two consecutive sets are equal or
/// k_max steps are taken. Hitting k_max is reported via `converged`.
UnrecoverableSeq compute_unrecoverable(const Polytope& X0, const LinearSystem& sys,
                                       const Polytope& U, int k_max = kDefaultKMax,
                                       const StepObserver& observer = {},
                                       const std::optional<Polytope>& domain = std::nullopt);

/// Throws OriginNotInU when 0 is not in U.
ReachSet reach_trunc(const LinearSystem& sys, const Polytope& U,
                     int horizon = kDefaultReachHorizon);

/// R intersected with (X_last \ X_kprime) has empty interior.
Prop5Verdict check_prop5(const ReachSet& R, const UnrecoverableSeq& seq, int kprime);

/// Closed loop x+ = Acl x + Bcl v with v frozen; `rows` constrain (x, v).
/// Throws UnstableClosedLoop if Acl is not Schur.
OinfSet compute_oinf(const Mat& Acl, const Mat& Bcl, const LinConstraintSet& rows,
                     int t_max = 200);

/// Brute force: true iff every control sequence from `u_grid` of length
/// `depth` drives x0 into the open X0 within `depth` steps.
bool oracle_unrecoverable(const Vec& x0, int depth, const std::vector<Vec>& u_grid,
                          const Polytope& X0, const LinearSystem& sys);

/// Tensor grid over the bounding box of U, `per_dim` points per axis,
/// keeping points inside U.
std::vector<Vec> control_grid(const Polytope& U, int per_dim);

}  // namespace actgov
