#pragma once

#include <optional>
#include <string>
#include <utility>

#include "actgov/error.hpp"
#include "actgov/optimize.hpp"

namespace actgov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitHashMismatch = 4;

/// Exit status for a library error: 2 for malformed or inconsistent input,
/// 3 for numerical failures, 4 for stale sets.
int exit_code_for(ErrorKind kind);

/// Unrecoverable sets of the scenario written as JSON, plus a run manifest
/// next to it (<out>.manifest.json).
int cmd_compute_sets(const std::string& scenario_path, const std::string& out_path, int k_max);

/// Closed-loop trajectory CSV. `sets_path` may be empty for modes that do
/// not use the unrecoverable sets (passthrough, rg).
int cmd_simulate(const std::string& scenario_path, const std::string& sets_path,
                 const std::string& out_csv);

/// SVG of the trajectory over the projected sets. `scenario_path` is
/// optional and only supplies the target marker.
int cmd_plot(const std::string& csv_path, const std::string& sets_path, const std::string& out_svg,
             std::pair<int, int> axes, int kprime, const std::string& scenario_path);

/// Big-M MIQP instance at `state` (default: the scenario's initial state)
/// with the scenario's nominal control at k = 0.
int cmd_export_miqp(const std::string& scenario_path, const std::string& sets_path,
                    const std::string& out_path, const std::optional<Vec>& state);

/// Command-line entry point.
int run(int argc, char** argv);

}  // namespace actgov::cli
