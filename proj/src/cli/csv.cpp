#include <cmath>
#include <cstdio>
#include <sstream>

#include "actgov/artifacts.hpp"
#include "actgov/error.hpp"

namespace actgov {

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out += ',';
  out += buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "k";
  if (traj.records.empty()) return out + "\n";
  const int n = static_cast<int>(traj.records.front().x.size());
  const int m = static_cast<int>(traj.records.front().u_applied.size());
  for (int i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",u_nom_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",u_app_" + std::to_string(i);
  out += ",modified,lambda,rg_v,status,audit\n";
  for (const StepRecord& r : traj.records) {
    out += std::to_string(r.k);
    for (int i = 0; i < n; ++i) put(out, r.x(i));
    for (int i = 0; i < m; ++i) put(out, r.u_nominal(i));
    for (int i = 0; i < m; ++i) put(out, r.u_applied(i));
    out += r.modified ? ",1" : ",0";
    put(out, r.lambda);
    put(out, r.rg_reference);
    out += ',';
    out += to_string(r.status);
    out += ',' + std::to_string(r.audit) + '\n';
  }
  return out;
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  fail(ErrorKind::kParseError, "CSV has no column '" + name + "'");
}

int CsvTable::state_dim() const {
  int n = 0;
  while (true) {
    const std::string name = "x_" + std::to_string(n + 1);
    bool found = false;
    for (const auto& h : header) found = found || h == name;
    if (!found) return n;
    ++n;
  }
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line) || line.empty()) fail(ErrorKind::kParseError, "CSV has no header");
  table.header = split(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      fail(ErrorKind::kParseError, "CSV line " + std::to_string(lineno) + " has " +
                                       std::to_string(cells.size()) + " cells, expected " +
                                       std::to_string(table.header.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      if (c == "nan") {
        row.push_back(std::nan(""));
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      // Non-numeric text cells (status) are kept as NaN.
      row.push_back(end != c.c_str() && *end == '\0' ? v : std::nan(""));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace actgov
