#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "actgov/error.hpp"
#include "actgov/governor.hpp"

namespace actgov {

BigMInstance build_big_m(const GovernorProblem& prob, const Vec& x, const Vec& u_phi,
                         double box_half_width) {
  const LinearSystem& sys = prob.sys();
  if (x.size() != sys.n() || u_phi.size() != sys.m()) {
    fail(ErrorKind::kDimensionMismatch, "state or nominal control has the wrong size");
  }
  if (!(box_half_width > 0.0)) fail(ErrorKind::kInvalidInput, "box half-width must be positive");
  BigMInstance inst;
  inst.S = prob.S();
  inst.u_phi = u_phi;
  inst.H = prob.U().A();
  inst.h = prob.U().b();
  const Vec Ax = sys.A * x;
  for (int j = 0; j < prob.unsafe().size(); ++j) {
    const Polytope& part = prob.unsafe()[j];
    inst.part_sizes.push_back(part.rows());
    for (int i = 0; i < part.rows(); ++i) {
      const auto G = part.A().row(i);
      const double g = part.b()(i);
      BigMInstance::Row row;
      row.part = j;
      row.row = i;
      row.gu = (G * sys.B).transpose();
      row.big_m = std::max(0.0, g + box_half_width * G.lpNorm<1>()) + 1.0;
      row.rhs = g - G.dot(Ax) - row.big_m;
      inst.rows.push_back(std::move(row));
    }
  }
  return inst;
}

namespace {

void term(std::ostream& os, double coef, const std::string& var, bool& first) {
  if (coef == 0.0) return;
  if (coef < 0) {
    os << " - ";
  } else if (!first) {
    os << " + ";
  } else {
    os << " ";
  }
  os << std::abs(coef) << ' ' << var;
  first = false;
}

std::string u_name(int k) { return "u" + std::to_string(k + 1); }
std::string d_name(int part, int row) {
  return "d_" + std::to_string(part + 1) + "_" + std::to_string(row + 1);
}

}  // namespace

std::string export_miqp_lp(const BigMInstance& inst) {
  const int m = static_cast<int>(inst.S.rows());
  std::ostringstream os;
  os << std::setprecision(17);
  // ||u - u_phi||_S^2 = u'Su - 2 (S u_phi)'u + u_phi'S u_phi
  const Vec lin = -2.0 * inst.S * inst.u_phi;
  os << "\\ Action governor one-step MIQP, big-M disjunctive encoding\n";
  os << "\\ objective constant " << inst.u_phi.dot(inst.S * inst.u_phi) << " omitted\n";
  os << "Minimize\n obj:";
  bool first = true;
  for (int k = 0; k < m; ++k) term(os, lin(k), u_name(k), first);
  os << (first ? " " : " + ") << "[";
  bool qfirst = true;
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const double c = a == b ? 2.0 * inst.S(a, a) : 4.0 * inst.S(a, b);
      const std::string var = a == b ? u_name(a) + " ^2" : u_name(a) + " * " + u_name(b);
      term(os, c, var, qfirst);
    }
  }
  os << " ] / 2\nSubject To\n";
  for (const auto& r : inst.rows) {
    os << " c_" << r.part + 1 << "_" << r.row + 1 << ":";
    bool f = true;
    for (int k = 0; k < m; ++k) term(os, r.gu(k), u_name(k), f);
    term(os, -r.big_m, d_name(r.part, r.row), f);
    os << " >= " << r.rhs << "\n";
  }
  for (size_t j = 0; j < inst.part_sizes.size(); ++j) {
    os << " sos1_" << j + 1 << ":";
    bool f = true;
    for (int i = 0; i < inst.part_sizes[j]; ++i) term(os, 1.0, d_name(static_cast<int>(j), i), f);
    os << " = 1\n";
  }
  for (int i = 0; i < inst.H.rows(); ++i) {
    os << " u_" << i + 1 << ":";
    bool f = true;
    for (int k = 0; k < m; ++k) term(os, inst.H(i, k), u_name(k), f);
    if (f) os << " 0 " << u_name(0);
    os << " <= " << inst.h(i) << "\n";
  }
  os << "Bounds\n";
  for (int k = 0; k < m; ++k) os << " " << u_name(k) << " free\n";
  os << "Binaries\n";
  for (size_t j = 0; j < inst.part_sizes.size(); ++j) {
    for (int i = 0; i < inst.part_sizes[j]; ++i) os << " " << d_name(static_cast<int>(j), i) << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace actgov
