#pragma once

#include <limits>
#include <random>
#include <vector>

#include "actgov/governor.hpp"
#include "test_util.hpp"

namespace actgov::testing {

struct EnumResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  Vec u;
  long combos = 0;
};

/// Minimum over every selection of one row per unsafe part (all parts, no
/// pruning) of the QP with those rows forced violated by the safety clearance.
inline EnumResult enumerate_disjuncts(const GovernorProblem& prob, const Vec& x, const Vec& u_phi) {
  const LinearSystem& sys = prob.sys();
  const PolyUnion& parts = prob.unsafe();
  const Vec Ax = sys.A * x;
  EnumResult out;
  std::vector<int> pick(parts.size(), 0);
  while (true) {
    LinConstraintSet cons = prob.U().cons();
    for (int j = 0; j < parts.size(); ++j) {
      const auto G = parts[j].A().row(pick[j]);
      cons.add_row(-(G * sys.B).transpose(),
                   G.dot(Ax) - parts[j].b()(pick[j]) - kSafetyClearance * G.norm());
    }
    ++out.combos;
    const SolveStatus r = solve_qp(prob.S(), u_phi, cons);
    if (r.optimal() && r.value < out.value) {
      out.feasible = true;
      out.value = r.value;
      out.u = r.point;
    }
    int j = 0;
    while (j < parts.size() && ++pick[j] == parts[j].rows()) pick[j++] = 0;
    if (j == parts.size()) break;
  }
  return out;
}

/// Random 2-state, 1-input governor instance with up to `max_parts` random
/// unsafe polytopes near the origin.
inline GovernorProblem random_governor_instance(std::mt19937& rng, int max_parts) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> nparts(1, max_parts);
  std::uniform_int_distribution<int> nrows(0, 3);
  Mat A(2, 2), B(2, 1);
  do {
    A << 1 + 0.3 * unit(rng), 0.5 * unit(rng), 0.5 * unit(rng), 1 + 0.3 * unit(rng);
  } while (std::abs(A.determinant()) < 0.2);
  B << unit(rng), 1.0 + 0.5 * unit(rng);
  const double ulim = 1.0 + std::abs(unit(rng));
  PolyUnion unsafe(2);
  const int k = nparts(rng);
  for (int j = 0; j < k; ++j) {
    Vec c(2);
    c << 1.5 * unit(rng), 1.5 * unit(rng);
    unsafe.add(random_polytope(rng, c, nrows(rng), 0.2, 0.8));
  }
  Mat S = Mat::Identity(1, 1) * (0.5 + std::abs(unit(rng)));
  return GovernorProblem(LinearSystem{A, B, 1.0}, interval(-ulim, ulim), S, unsafe,
                         GovernorMode::kMiqp);
}

}  // namespace actgov::testing
