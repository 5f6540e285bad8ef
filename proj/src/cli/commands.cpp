#include "actgov/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "actgov/artifacts.hpp"
#include "actgov/scenario_io.hpp"
#include "actgov/set_json.hpp"
#include "actgov/simulate.hpp"
#include "log.hpp"

namespace actgov::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string quoted(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

int report(ErrorKind kind, const std::string& message) {
  std::cerr << "error: kind=" << to_string(kind) << " message=\"" << quoted(message) << "\"\n";
  return exit_code_for(kind);
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report(e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return report(ErrorKind::kParseError, e.what());
  } catch (const std::exception& e) {
    return report(ErrorKind::kNumericalFailure, e.what());
  }
}

/// Loads the sets and refuses them when they were computed for another system.
UnrecoverableSeq load_sets(const std::string& path, const Scenario& scn, json* raw = nullptr) {
  json j = read_json_file(path);
  std::uint64_t stored = 0;
  UnrecoverableSeq seq = sequence_from_json(j, &stored);
  const std::uint64_t expected = system_hash(scn);
  if (stored != expected) {
    fail(ErrorKind::kHashMismatch, "sets in '" + path + "' were computed for system " +
                                       hash_hex(stored) + ", scenario has " + hash_hex(expected));
  }
  if (seq.sets[0].dim() != scn.sys.n()) {
    fail(ErrorKind::kDimensionMismatch, "sets dimension does not match the scenario");
  }
  if (raw) *raw = std::move(j);
  return seq;
}

bool mode_needs_sets(GovernorMode mode) {
  return mode == GovernorMode::kMiqp || mode == GovernorMode::kBisect;
}

json manifest(const std::string& command, const std::string& scenario_path, const Scenario& scn) {
  return {{"tool", "ag"},
          {"version", kVersion},
          {"command", command},
          {"scenario", scenario_path},
          {"config_hash", hash_hex(config_hash(scn))},
          {"system_hash", hash_hex(system_hash(scn))}};
}

std::pair<int, int> parse_axes(const std::string& text) {
  int i = 0, j = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> i >> comma >> j) || comma != ',' || !in.eof() || i < 1 || j < 1 || i == j) {
    fail(ErrorKind::kInvalidInput, "--axes expects two distinct 1-based indices like \"1,2\"");
  }
  return {i - 1, j - 1};
}

/// Equilibrium the scenario's policy steers towards, padded with zeros.
Vec scenario_target(const Scenario& scn) {
  Vec t = Vec::Zero(scn.sys.n());
  const Vec& r = scn.sim.reference.at(0);
  for (int i = 0; i < std::min<int>(r.size(), t.size()); ++i) t(i) = r(i);
  return t;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParseError:
    case ErrorKind::kInvalidInput:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kEmptyPolytope:
    case ErrorKind::kUnboundedPolytope:
    case ErrorKind::kNotPositiveDefinite:
    case ErrorKind::kOriginNotInU:
      return kExitValidation;
    case ErrorKind::kHashMismatch:
      return kExitHashMismatch;
    case ErrorKind::kNumericalFailure:
    case ErrorKind::kSingularMatrix:
    case ErrorKind::kRiccatiDivergence:
    case ErrorKind::kNotStabilizable:
    case ErrorKind::kUnstableClosedLoop:
    case ErrorKind::kInfeasible:
    case ErrorKind::kUnboundedDirection:
    case ErrorKind::kEmptySaturationRange:
    case ErrorKind::kSeedInadmissible:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int cmd_compute_sets(const std::string& scenario_path, const std::string& out_path, int k_max) {
  return guarded([&] {
    if (k_max < 0) fail(ErrorKind::kInvalidInput, "--kmax must be non-negative");
    const Scenario scn = load_scenario(scenario_path);
    log(LogLevel::kInfo, "computing unrecoverable sets for '" + scn.name + "'");
    const auto t0 = std::chrono::steady_clock::now();
    const UnrecoverableSeq seq = scenario_sets(scn, k_max, [](int k, const PolyUnion& X) {
      log(LogLevel::kDebug, "X_" + std::to_string(k) + ": " + std::to_string(X.size()) + " parts");
    });
    json out = sequence_to_json(seq, system_hash(scn));
    if (scn.policy.kind == PolicyKind::kAccLqr) {
      const RgModel model = acc_rg_model(scn);
      const OinfSet oinf = compute_oinf(model.Acl, model.Bcl, model.rows);
      out["oinf"] = set_to_json(PolyUnion(oinf.cons));
      out["oinf_reference"] = scn.sim.reference.at(0)(0);
    }
    const double offline_ms = elapsed_ms(t0);
    write_text_file(out_path, out.dump() + "\n");

    json man = manifest("compute-sets", scenario_path, scn);
    man["k_max"] = k_max;
    man["K"] = seq.K;
    man["converged"] = seq.converged;
    man["parts"] = seq.last().size();
    man["artifacts"] = {out_path};
    man["offline_ms"] = offline_ms;
    write_text_file(out_path + ".manifest.json", man.dump(2) + "\n");
    log(LogLevel::kInfo, "K = " + std::to_string(seq.K) + (seq.converged ? " (converged)" : " (not converged)") +
                             ", " + std::to_string(seq.last().size()) + " parts");
    return kExitOk;
  });
}

int cmd_simulate(const std::string& scenario_path, const std::string& sets_path,
                 const std::string& out_csv) {
  return guarded([&] {
    const Scenario scn = load_scenario(scenario_path);
    const GovernorMode mode = scn.governor.mode;
    std::optional<GovernorProblem> prob;
    if (!sets_path.empty()) {
      prob.emplace(make_governor_problem(scn, load_sets(sets_path, scn)));
    } else if (mode_needs_sets(mode)) {
      fail(ErrorKind::kInvalidInput,
           std::string("mode '") + to_string(mode) + "' needs --sets from compute-sets");
    } else {
      prob.emplace(scn.sys, scn.U, scn.S, PolyUnion(scn.X0), mode);
    }
    const Trajectory traj = simulate(scn, *prob);
    write_text_file(out_csv, trajectory_csv(traj));

    int modified = 0;
    for (const StepRecord& r : traj.records) modified += r.modified;
    json man = manifest("simulate", scenario_path, scn);
    man["mode"] = to_string(mode);
    man["sets"] = sets_path;
    man["artifacts"] = {out_csv};
    man["records"] = traj.records.size();
    man["modified_steps"] = modified;
    man["halted"] = traj.halted;
    man["halt_reason"] = traj.halt_reason;
    man["assumption1_violations"] = traj.assumption1_violations();
    man["online_mean_us"] =
        traj.records.empty() ? 0.0 : 1e6 * traj.online_seconds / traj.records.size();
    write_text_file(out_csv + ".manifest.json", man.dump(2) + "\n");
    if (traj.halted) log(LogLevel::kError, "run halted: " + traj.halt_reason);
    return kExitOk;
  });
}

int cmd_plot(const std::string& csv_path, const std::string& sets_path, const std::string& out_svg,
             std::pair<int, int> axes, int kprime, const std::string& scenario_path) {
  return guarded([&] {
    std::ifstream in(csv_path);
    if (!in) fail(ErrorKind::kParseError, "cannot open '" + csv_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const CsvTable table = parse_csv(buf.str());
    const int n = table.state_dim();
    const auto [ax, ay] = axes;
    if (ax >= n || ay >= n) fail(ErrorKind::kInvalidInput, "--axes exceeds the state dimension");

    std::optional<Scenario> scn;
    if (!scenario_path.empty()) scn = load_scenario(scenario_path);
    json raw;
    UnrecoverableSeq seq;
    if (scn) {
      seq = load_sets(sets_path, *scn, &raw);
    } else {
      raw = read_json_file(sets_path);
      seq = sequence_from_json(raw);
    }
    if (seq.sets[0].dim() != n) fail(ErrorKind::kDimensionMismatch, "sets do not match the trajectory");

    PlotData plot;
    const int cx = table.column("x_" + std::to_string(ax + 1));
    const int cy = table.column("x_" + std::to_string(ay + 1));
    for (const auto& row : table.rows) plot.path.emplace_back(row[cx], row[cy]);
    if (plot.path.empty()) fail(ErrorKind::kParseError, "trajectory has no rows");
    if (scn) {
      const Vec t = scenario_target(*scn);
      plot.target = std::make_pair(t(ax), t(ay));
    }

    // Window: trajectory and target, padded relative to the larger extent.
    double x0 = plot.path[0].first, x1 = x0, y0 = plot.path[0].second, y1 = y0;
    auto grow = [&](double x, double y) {
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    };
    for (const auto& [x, y] : plot.path) grow(x, y);
    if (plot.target) grow(plot.target->first, plot.target->second);
    const double span = std::max({x1 - x0, y1 - y0, 1.0});
    const double px = std::max(0.15 * (x1 - x0), 0.15 * span);
    const double py = std::max(0.15 * (y1 - y0), 0.15 * span);
    plot.lo = {x0 - px, y0 - py};
    plot.hi = {x1 + px, y1 + py};

    for (const Polytope& P : seq.at(kprime)) {
      Polygon2 g = project_polytope(P, ax, ay, plot.lo, plot.hi);
      if (!g.empty()) plot.unsafe.push_back(std::move(g));
    }
    for (const Polytope& P : seq.sets[0]) {
      Polygon2 g = project_polytope(P, ax, ay, plot.lo, plot.hi);
      if (!g.empty()) plot.exclusion.push_back(std::move(g));
    }
    if (raw.contains("oinf") && raw.contains("oinf_reference")) {
      const PolyUnion stacked = set_from_json(raw["oinf"]);
      if (stacked.size() == 1 && stacked.dim() == n + 1) {
        const double v = raw["oinf_reference"].get<double>();
        const Polytope& O = stacked[0];
        const Polytope slice(O.A().leftCols(n), O.b() - v * O.A().col(n));
        Polygon2 g = project_polytope(slice, ax, ay, plot.lo, plot.hi);
        if (!g.empty()) plot.oinf = std::move(g);
      }
    }

    plot.title = scn ? scn->name : csv_path;
    plot.x_label = "x_" + std::to_string(ax + 1);
    plot.y_label = "x_" + std::to_string(ay + 1);
    write_text_file(out_svg, render_svg(plot));
    return kExitOk;
  });
}

int cmd_export_miqp(const std::string& scenario_path, const std::string& sets_path,
                    const std::string& out_path, const std::optional<Vec>& state) {
  return guarded([&] {
    const Scenario scn = load_scenario(scenario_path);
    const Vec x = state ? *state : scn.sim.x0;
    if (x.size() != scn.sys.n()) fail(ErrorKind::kDimensionMismatch, "--state has the wrong dimension");
    const GovernorProblem prob = make_governor_problem(scn, load_sets(sets_path, scn));
    const Vec u_phi = scenario_nominal(scn, policy_gain(scn), x, 0);
    const double box = scn.governor.domain_half_width.value_or(kDefaultBoxHalfWidth);
    write_text_file(out_path, export_miqp_lp(build_big_m(prob, x, u_phi, box)));
    return kExitOk;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Action governor: offline unrecoverable sets and online supervision"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string scenario, out, sets, trajectory, axes = "1,2", state;
  int k_max = kDefaultKMax;
  int kprime = -1;
  unsigned long long seed = 0;
  app.add_option("--seed", seed, "Recorded for reproducibility; all commands are deterministic");

  CLI::App* compute = app.add_subcommand("compute-sets", "Compute the unrecoverable sets");
  compute->add_option("--scenario", scenario, "Scenario JSON")->required();
  compute->add_option("--out", out, "Output sets JSON")->required();
  compute->add_option("--kmax", k_max, "Maximum number of iterations");

  CLI::App* sim = app.add_subcommand("simulate", "Closed-loop run to CSV");
  sim->add_option("--scenario", scenario, "Scenario JSON")->required();
  sim->add_option("--sets", sets, "Sets JSON from compute-sets");
  sim->add_option("--out", out, "Output CSV")->required();

  CLI::App* plot = app.add_subcommand("plot", "Render a trajectory over the sets as SVG");
  plot->add_option("--trajectory", trajectory, "Trajectory CSV")->required();
  plot->add_option("--sets", sets, "Sets JSON from compute-sets")->required();
  plot->add_option("--out", out, "Output SVG")->required();
  plot->add_option("--axes", axes, "State coordinates to draw, e.g. 1,2");
  plot->add_option("--kprime", kprime, "Index of the drawn unrecoverable set (negative: last)");
  plot->add_option("--scenario", scenario, "Scenario JSON (target marker and hash check)");

  CLI::App* exp = app.add_subcommand("export-miqp", "Write the big-M MIQP in LP format");
  exp->add_option("--scenario", scenario, "Scenario JSON")->required();
  exp->add_option("--sets", sets, "Sets JSON from compute-sets")->required();
  exp->add_option("--out", out, "Output .lp file")->required();
  exp->add_option("--state", state, "State as comma-separated numbers (default: x0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report(ErrorKind::kInvalidInput, e.what());
  }
  log(LogLevel::kDebug, "seed " + std::to_string(seed));

  if (*compute) return cmd_compute_sets(scenario, out, k_max);
  if (*sim) return cmd_simulate(scenario, sets, out);
  if (*plot) {
    std::pair<int, int> ij;
    const int rc = guarded([&] {
      ij = parse_axes(axes);
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
    return cmd_plot(trajectory, sets, out, ij, kprime, scenario);
  }
  std::optional<Vec> x;
  if (!state.empty()) {
    const int rc = guarded([&] {
      std::vector<double> values;
      std::stringstream in(state);
      std::string item;
      while (std::getline(in, item, ',')) {
        try {
          size_t used = 0;
          values.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          fail(ErrorKind::kInvalidInput, "--state: cannot parse '" + item + "'");
        }
      }
      x = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
  }
  return cmd_export_miqp(scenario, sets, out, x);
}

}  // namespace actgov::cli
