#pragma once

#include <optional>
#include <string>
#include <vector>

#include "actgov/polytope.hpp"
#include "actgov/simulate.hpp"

namespace actgov {

/// Columns: k, x_1..x_n, u_nom_1..u_nom_m, u_app_1..u_app_m, modified,
/// lambda, rg_v, status, audit. Numbers carry 12 significant digits.
std::string trajectory_csv(const Trajectory& traj);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws ParseError when absent.
  int column(const std::string& name) const;
  /// Number of state columns x_1..x_n.
  int state_dim() const;
};

/// Numeric CSV with a header row ("nan" accepted). Throws ParseError.
CsvTable parse_csv(const std::string& text);

/// Counter-clockwise polygon in the plane.
using Polygon2 = std::vector<std::pair<double, double>>;

/// Shadow of P on coordinates (i, j) clipped to the window
/// [lo_i, hi_i] x [lo_j, hi_j]; empty when they do not meet.
Polygon2 project_polytope(const Polytope& P, int i, int j, const std::pair<double, double>& lo,
                          const std::pair<double, double>& hi);

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Polygon2> unsafe;     // X_k' parts
  std::vector<Polygon2> exclusion;  // X_0 parts
  std::optional<Polygon2> oinf;     // reference-governor admissible set slice
  Polygon2 path;
  std::optional<std::pair<double, double>> target;
  std::pair<double, double> lo;  // data window
  std::pair<double, double> hi;
};

/// Standalone SVG document: shaded polygons, one trajectory polyline and
/// start/target markers.
std::string render_svg(const PlotData& data);

}  // namespace actgov
