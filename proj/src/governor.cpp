#include "actgov/governor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "actgov/error.hpp"

namespace actgov {

const char* to_string(GovernorMode mode) {
  switch (mode) {
    case GovernorMode::kMiqp: return "miqp";
    case GovernorMode::kBisect: return "bisect";
    case GovernorMode::kRgBaseline: return "rg";
    case GovernorMode::kPassthrough: return "passthrough";
  }
  return "?";
}

const char* to_string(GovernStatus status) {
  switch (status) {
    case GovernStatus::kExact: return "exact";
    case GovernStatus::kBisectApprox: return "bisect_approx";
    case GovernStatus::kInfeasible: return "infeasible";
  }
  return "?";
}

GovernorMode governor_mode_from_string(const std::string& name) {
  for (GovernorMode m : {GovernorMode::kMiqp, GovernorMode::kBisect, GovernorMode::kRgBaseline,
                         GovernorMode::kPassthrough}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorKind::kParseError, "unknown governor mode '" + name + "'");
}

GovernorProblem::GovernorProblem(LinearSystem sys, Polytope U, Mat S, PolyUnion unsafe,
                                 GovernorMode mode)
    : sys_(std::move(sys)),
      U_(std::move(U)),
      S_(std::move(S)),
      unsafe_(std::move(unsafe)),
      mode_(mode) {
  sys_.validate();
  if (U_.dim() != sys_.m()) fail(ErrorKind::kDimensionMismatch, "U does not match the input size");
  if (S_.rows() != sys_.m() || S_.cols() != sys_.m()) {
    fail(ErrorKind::kDimensionMismatch, "weight S must be m x m");
  }
  if (unsafe_.dim() != sys_.n()) {
    fail(ErrorKind::kDimensionMismatch, "unsafe set does not match the state size");
  }
  if (!S_.isApprox(S_.transpose(), 1e-10) || Eigen::LLT<Mat>(S_).info() != Eigen::Success) {
    fail(ErrorKind::kNotPositiveDefinite, "weight S must be symmetric positive definite");
  }
  if (U_.is_empty()) fail(ErrorKind::kEmptyPolytope, "control set U is empty");
  if (!U_.is_bounded()) fail(ErrorKind::kUnboundedPolytope, "control set U must be bounded");
}

namespace {

// Signed depth of y inside a part: min over rows of the normalized slack.
double depth(const Polytope& part, const Vec& y) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < part.rows(); ++i) {
    const double norm = part.A().row(i).norm();
    if (norm == 0.0) continue;
    best = std::min(best, (part.b()(i) - part.A().row(i).dot(y)) / norm);
  }
  return best;
}

// Within the accepted clearance of the part's closure.
bool too_close(const Polytope& part, const Vec& y) {
  return depth(part, y) > -0.5 * kSafetyClearance;
}

}  // namespace

bool GovernorProblem::successor_safe(const Vec& x, const Vec& u) const {
  const Vec y = sys_.step(x, u);
  for (const Polytope& part : unsafe_) {
    if (too_close(part, y)) return false;
  }
  return true;
}

namespace {

double weighted_sq(const Mat& S, const Vec& d) { return d.dot(S * d); }

bool in_U(const Polytope& U, const Vec& u) { return U.contains(u, Strictness::kClosure); }

struct Disjunct {
  int part;  // index into the branching order
  int row;
};

// Lexicographic key for deterministic tie-breaking among optimal selections.
std::vector<std::pair<int, int>> selection_key(const std::vector<Disjunct>& sel,
                                               const std::vector<std::pair<int, Polytope>>& parts) {
  std::vector<std::pair<int, int>> key;
  for (const Disjunct& d : sel) key.emplace_back(parts[d.part].first, d.row);
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

std::vector<std::pair<int, Polytope>> reachable_parts(const GovernorProblem& prob, const Vec& x) {
  const LinearSystem& sys = prob.sys();
  const Vec Ax = sys.A * x;
  std::vector<std::pair<int, Polytope>> out;
  for (int j = 0; j < prob.unsafe().size(); ++j) {
    const Polytope& part = prob.unsafe()[j];
    // {u in U : G (A x + B u) <= g + clearance}: controls whose successor
    // comes within the clearance of the part.
    Polytope in_u = prob.U().with_strictness(false);
    for (int i = 0; i < part.rows(); ++i) {
      const auto G = part.A().row(i);
      in_u.add_row((G * sys.B).transpose(),
                   part.b()(i) + kSafetyClearance * G.norm() - G.dot(Ax));
    }
    if (!in_u.is_empty()) out.emplace_back(j, part);
  }
  return out;
}

GovernResult govern_miqp(const GovernorProblem& prob, const Vec& x, const Vec& u_phi) {
  const LinearSystem& sys = prob.sys();
  if (x.size() != sys.n() || u_phi.size() != sys.m()) {
    fail(ErrorKind::kDimensionMismatch, "state or nominal control has the wrong size");
  }
  const Mat& S = prob.S();
  GovernResult res;

  if (in_U(prob.U(), u_phi) && prob.successor_safe(x, u_phi)) {
    res.u = u_phi;
    return res;
  }

  // Parts in branching order: decreasing depth of the nominal successor.
  std::vector<std::pair<int, Polytope>> parts = reachable_parts(prob, x);
  const Vec y_phi = sys.step(x, u_phi);
  std::vector<double> part_depth;
  for (const auto& [j, p] : parts) part_depth.push_back(depth(p, y_phi));
  std::vector<int> order(parts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return part_depth[a] > part_depth[b]; });
  {
    std::vector<std::pair<int, Polytope>> sorted;
    for (int k : order) sorted.push_back(std::move(parts[k]));
    parts = std::move(sorted);
  }
  // Within a part, rows by decreasing slack of the disjunct G y >= g at y_phi.
  std::vector<std::vector<int>> row_order(parts.size());
  for (size_t k = 0; k < parts.size(); ++k) {
    const Polytope& p = parts[k].second;
    std::vector<double> slack(p.rows());
    for (int i = 0; i < p.rows(); ++i) {
      const double norm = std::max(p.A().row(i).norm(), 1e-300);
      slack[i] = (p.A().row(i).dot(y_phi) - p.b()(i)) / norm;
    }
    row_order[k].resize(p.rows());
    std::iota(row_order[k].begin(), row_order[k].end(), 0);
    std::stable_sort(row_order[k].begin(), row_order[k].end(),
                     [&](int a, int b) { return slack[a] > slack[b]; });
  }

  const Vec Ax = sys.A * x;
  auto node_constraints = [&](const std::vector<Disjunct>& sel) {
    LinConstraintSet cons = prob.U().cons();
    for (const Disjunct& d : sel) {
      const Polytope& p = parts[d.part].second;
      const auto G = p.A().row(d.row);
      // G (A x + B u) >= g + clearance  <=>  -G B u <= G A x - g - clearance
      cons.add_row(-(G * sys.B).transpose(),
                   G.dot(Ax) - p.b()(d.row) - kSafetyClearance * G.norm());
    }
    return cons;
  };

  double best = std::numeric_limits<double>::infinity();
  Vec best_u;
  std::vector<std::pair<int, int>> best_key;
  std::vector<std::vector<Disjunct>> stack{{}};
  int nodes = 0;
  while (!stack.empty()) {
    std::vector<Disjunct> sel = std::move(stack.back());
    stack.pop_back();
    ++nodes;
    const SolveStatus qp = solve_qp(S, u_phi, node_constraints(sel));
    if (!qp.optimal()) continue;
    const double tie = 1e-9 * std::max(1.0, best);
    if (qp.value > best + tie) continue;

    const Vec y = sys.step(x, qp.point);
    int violated = -1;
    for (size_t k = 0; k < parts.size(); ++k) {
      if (too_close(parts[k].second, y)) {
        violated = static_cast<int>(k);
        break;
      }
    }
    if (violated < 0) {
      auto key = selection_key(sel, parts);
      if (qp.value < best - tie || best_u.size() == 0 || key < best_key) {
        best = std::min(best, qp.value);
        best_u = qp.point;
        best_key = std::move(key);
      }
      continue;
    }
    const std::vector<int>& rows = row_order[violated];
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      std::vector<Disjunct> child = sel;
      child.push_back({violated, *it});
      stack.push_back(std::move(child));
    }
  }

  res.nodes = nodes;
  if (best_u.size() == 0) {
    res.status = GovernStatus::kInfeasible;
    const SolveStatus proj = solve_qp(S, u_phi, prob.U().cons());
    res.u = proj.optimal() ? proj.point : u_phi;
  } else {
    res.u = best_u;
  }
  res.objective = weighted_sq(S, res.u - u_phi);
  res.modified = (res.u - u_phi).cwiseAbs().maxCoeff() > 0.0;
  return res;
}

GovernResult govern_bisect(const GovernorProblem& prob, const Vec& x, const Vec& u_phi,
                           const Vec& u_psi, double delta_tol) {
  if (x.size() != prob.sys().n() || u_phi.size() != prob.sys().m() ||
      u_psi.size() != prob.sys().m()) {
    fail(ErrorKind::kDimensionMismatch, "state or control has the wrong size");
  }
  if (!(delta_tol > 0.0) || delta_tol >= 1.0) {
    fail(ErrorKind::kInvalidInput, "bisection tolerance must lie in (0, 1)");
  }
  double lo = 0.0, hi = 1.0, lambda = 1.0;
  int iterations = 0;
  while (hi - lo > delta_tol) {
    const Vec u = lambda * u_phi + (1.0 - lambda) * u_psi;
    if (prob.successor_safe(x, u)) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    lambda = 0.5 * (lo + hi);
    ++iterations;
  }
  GovernResult res;
  res.u = lo * u_phi + (1.0 - lo) * u_psi;
  res.lambda = lo;
  res.nodes = iterations;
  res.modified = lo < 1.0;
  res.status = prob.successor_safe(x, res.u) ? GovernStatus::kBisectApprox
                                             : GovernStatus::kInfeasible;
  res.objective = weighted_sq(prob.S(), res.u - u_phi);
  return res;
}

double rg_update(const OinfSet& oinf, const Vec& x, double r, double v_prev, double delta_tol) {
  if (x.size() != oinf.n_state || oinf.cons.dim() != oinf.n_state + 1) {
    fail(ErrorKind::kDimensionMismatch, "state size does not match O-infinity");
  }
  if (!(delta_tol > 0.0)) fail(ErrorKind::kInvalidInput, "bisection tolerance must be positive");
  auto admissible = [&](double v) { return oinf.contains(x, Vec::Constant(1, v)); };
  if (!admissible(v_prev)) {
    fail(ErrorKind::kSeedInadmissible, "previous reference is not admissible at this state");
  }
  if (admissible(r)) return r;
  const double span = std::abs(r - v_prev);
  double lo = 0.0, hi = 1.0;
  while ((hi - lo) * span > delta_tol) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(v_prev + mid * (r - v_prev))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return v_prev + lo * (r - v_prev);
}

bool assumption1_audit(const SafeModePolicy& policy, const GovernorProblem& prob, const Vec& x,
                       int t) {
  return prob.successor_safe(x, policy(x, t));
}

}  // namespace actgov
