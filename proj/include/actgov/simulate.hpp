#pragma once

#include <optional>
#include <string>
#include <vector>

#include "actgov/governor.hpp"
#include "actgov/scenarios.hpp"

namespace actgov {

/// One closed-loop sample. The control fields hold the action evaluated at
/// x; the final record's action is evaluated but never applied.
struct StepRecord {
  int k = 0;
  Vec x;
  Vec u_nominal;
  Vec u_applied;
  bool modified = false;
  /// Bisection lower bound; 1 outside bisect mode.
  double lambda = 1.0;
  /// Governed reference of the reference-governor baseline; NaN otherwise.
  double rg_reference = 0.0;
  GovernStatus status = GovernStatus::kExact;
  /// Safe-mode audit in bisect mode: 1 holds, 0 violated, -1 not evaluated.
  int audit = -1;
  int nodes = 0;
};

struct Trajectory {
  std::vector<StepRecord> records;
  /// Set when the run stopped before `steps`.
  bool halted = false;
  std::string halt_reason;
  /// Wall time spent choosing controls (not part of the deterministic output).
  double online_seconds = 0.0;

  int assumption1_violations() const;
};

/// Safe-mode control of the scenario: the repulsive field for the robot and
/// full braking for car following.
SafeModePolicy scenario_safemode(const Scenario& scn);

/// Nominal control of the scenario's policy at (x, k).
Vec scenario_nominal(const Scenario& scn, const Mat& K, const Vec& x, int k);

/// Closed-loop run of `scn` under `prob`. Failures are reported in-band:
/// the run halts with `halted` set and the offending record last.
Trajectory simulate(const Scenario& scn, const GovernorProblem& prob);

/// Largest admissible reference interval at x for the baseline, or nullopt.
std::optional<std::pair<double, double>> oinf_reference_range(const OinfSet& oinf, const Vec& x);

}  // namespace actgov
