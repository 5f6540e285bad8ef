#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "actgov/error.hpp"
#include "actgov/optimize.hpp"

using namespace actgov;

namespace {

LinConstraintSet interval(double lo, double hi) {
  LinConstraintSet c(1);
  c.add_row(Vec::Constant(1, 1.0), hi);
  c.add_row(Vec::Constant(1, -1.0), -lo);
  return c;
}

LinConstraintSet unit_square() {
  LinConstraintSet c(2);
  c.add_row(Vec::Unit(2, 0), 1.0);
  c.add_row(-Vec::Unit(2, 0), 0.0);
  c.add_row(Vec::Unit(2, 1), 1.0);
  c.add_row(-Vec::Unit(2, 1), 0.0);
  return c;
}

// Random bounded constraint set: a box of half-width 5 plus `extra` random
// halfspaces that all contain the origin.
LinConstraintSet random_cons(std::mt19937& rng, int dim, int extra) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> off(0.5, 3.0);
  LinConstraintSet c(dim);
  for (int k = 0; k < dim; ++k) {
    c.add_row(Vec::Unit(dim, k), 5.0);
    c.add_row(-Vec::Unit(dim, k), 5.0);
  }
  for (int i = 0; i < extra; ++i) {
    Vec a(dim);
    for (int k = 0; k < dim; ++k) a(k) = g(rng);
    c.add_row(a, off(rng));
  }
  return c;
}

// Brute-force LP oracle: best objective over all feasible basic solutions.
double brute_force_min(const Vec& c, const LinConstraintSet& cons) {
  const int n = cons.dim();
  const int m = cons.rows();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    Mat As(n, n);
    Vec bs(n);
    for (int i = 0; i < n; ++i) {
      As.row(i) = cons.A.row(idx[i]);
      bs(i) = cons.b(idx[i]);
    }
    Eigen::FullPivLU<Mat> lu(As);
    if (lu.rank() == n) {
      const Vec v = lu.solve(bs);
      if (cons.max_violation(v) <= 1e-9) best = std::min(best, c.dot(v));
    }
    int i = n - 1;
    while (i >= 0 && idx[i] == m - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("solve_lp on a 1-D box") {
  const auto box = interval(0.0, 2.0);
  SUBCASE("minimum") {
    const SolveStatus r = solve_lp(Vec::Constant(1, 1.0), box);
    REQUIRE(r.optimal());
    CHECK(r.point(0) == doctest::Approx(0.0));
    CHECK(r.value == doctest::Approx(0.0));
  }
  SUBCASE("maximum") {
    const SolveStatus r = solve_lp(Vec::Constant(1, -1.0), box);
    REQUIRE(r.optimal());
    CHECK(r.point(0) == doctest::Approx(2.0));
    CHECK(r.value == doctest::Approx(-2.0));
  }
  SUBCASE("contradictory bounds") {
    LinConstraintSet c(1);
    c.add_row(Vec::Constant(1, 1.0), -1.0);
    c.add_row(Vec::Constant(1, -1.0), -1.0);
    CHECK(solve_lp(Vec::Constant(1, 1.0), c).kind == SolveStatus::Kind::kInfeasible);
  }
}

TEST_CASE("solve_lp reports unboundedness and lineality") {
  LinConstraintSet half(2);
  half.add_row(Vec::Unit(2, 0), 2.0);
  CHECK(solve_lp(-Vec::Unit(2, 0), half).kind == SolveStatus::Kind::kOptimal);
  CHECK(solve_lp(Vec::Unit(2, 0), half).kind == SolveStatus::Kind::kUnbounded);
  CHECK(solve_lp(Vec::Unit(2, 1), half).kind == SolveStatus::Kind::kUnbounded);
  // Rank-deficient rows with an objective orthogonal to the lineality.
  const SolveStatus r = solve_lp(-Vec::Unit(2, 0), half);
  CHECK(r.value == doctest::Approx(-2.0));
  CHECK(r.point(0) == doctest::Approx(2.0));
}

TEST_CASE("solve_lp rejects bad input") {
  CHECK_THROWS_AS(solve_lp(Vec::Zero(2), interval(0, 1)), Error);
  LinConstraintSet c(1);
  c.add_row(Vec::Constant(1, std::nan("")), 1.0);
  try {
    solve_lp(Vec::Zero(1), c);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidInput);
  }
}

TEST_CASE("solve_lp matches a brute-force vertex oracle") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + trial % 4;
    const auto cons = random_cons(rng, dim, 2 + trial % 6);
    Vec c(dim);
    for (int k = 0; k < dim; ++k) c(k) = g(rng);
    const SolveStatus r = solve_lp(c, cons);
    REQUIRE(r.optimal());
    CHECK(cons.max_violation(r.point) <= kFeasTol);
    CHECK(r.value == doctest::Approx(brute_force_min(c, cons)).epsilon(1e-9));
  }
}

TEST_CASE("solve_lp handles degenerate vertices") {
  // Many constraints through the same vertex (1, 1).
  LinConstraintSet c = unit_square();
  for (int k = 1; k <= 6; ++k) {
    Vec a(2);
    a << 1.0, static_cast<double>(k);
    c.add_row(a, 1.0 + k);
  }
  const SolveStatus r = solve_lp(-Vec::Ones(2), c);
  REQUIRE(r.optimal());
  CHECK(r.value == doctest::Approx(-2.0));
}

TEST_CASE("solve_qp examples") {
  SUBCASE("projection onto a halfline") {
    LinConstraintSet c(1);
    c.add_row(Vec::Constant(1, 1.0), 2.0);
    const SolveStatus r = solve_qp(Mat::Identity(1, 1), Vec::Constant(1, 3.0), c);
    REQUIRE(r.optimal());
    CHECK(r.point(0) == doctest::Approx(2.0));
    CHECK(r.value == doctest::Approx(1.0));
  }
  SUBCASE("unconstrained") {
    const SolveStatus r = solve_qp(Mat::Identity(2, 2), Vec::Ones(2), LinConstraintSet(2));
    REQUIRE(r.optimal());
    CHECK(r.point.isApprox(Vec::Ones(2)));
    CHECK(r.value == 0.0);
  }
  SUBCASE("weighted projection onto a halfplane, KKT oracle") {
    Mat S = Mat::Zero(2, 2);
    S.diagonal() << 1.0, 4.0;
    Vec target(2);
    target << 2.0, 2.0;
    LinConstraintSet c(2);
    c.add_row(Vec::Ones(2), 2.0);

    // Active-constraint KKT system: 2S z + mu a = 2S t, a.z = 2.
    Mat kkt = Mat::Zero(3, 3);
    kkt.topLeftCorner(2, 2) = 2.0 * S;
    kkt.block(0, 2, 2, 1) = Vec::Ones(2);
    kkt.block(2, 0, 1, 2) = Vec::Ones(2).transpose();
    Vec rhs(3);
    rhs << 2.0 * S * target, 2.0;
    const Vec sol = kkt.lu().solve(rhs);
    REQUIRE(sol(2) > 0.0);  // multiplier sign confirms the row is active
    CHECK(sol(0) == doctest::Approx(0.4));
    CHECK(sol(1) == doctest::Approx(1.6));

    const SolveStatus r = solve_qp(S, target, c);
    REQUIRE(r.optimal());
    CHECK(r.point(0) == doctest::Approx(sol(0)).epsilon(1e-10));
    CHECK(r.point(1) == doctest::Approx(sol(1)).epsilon(1e-10));
    CHECK(r.value == doctest::Approx(3.2));
  }
}

TEST_CASE("solve_qp errors") {
  Mat bad(1, 1);
  bad << -1.0;
  CHECK_THROWS_AS(solve_qp(bad, Vec::Zero(1), LinConstraintSet(1)), Error);
  CHECK_THROWS_AS(solve_qp(Mat::Identity(2, 2), Vec::Zero(1), LinConstraintSet(1)), Error);
  LinConstraintSet c(1);
  c.add_row(Vec::Constant(1, 1.0), -1.0);
  c.add_row(Vec::Constant(1, -1.0), -1.0);
  CHECK(solve_qp(Mat::Identity(1, 1), Vec::Zero(1), c).kind == SolveStatus::Kind::kInfeasible);
}

TEST_CASE("solve_qp properties on random instances") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + trial % 3;
    const auto cons = random_cons(rng, dim, 3 + trial % 5);
    Mat L = Mat::Random(dim, dim);
    const Mat S = L * L.transpose() + 0.1 * Mat::Identity(dim, dim);
    Vec target(dim);
    for (int k = 0; k < dim; ++k) target(k) = 4.0 * g(rng);

    const SolveStatus r = solve_qp(S, target, cons);
    REQUIRE(r.optimal());
    CHECK(cons.max_violation(r.point) <= kFeasTol);
    CHECK(r.value >= 0.0);
    if (cons.max_violation(target) <= 0.0) CHECK(r.value == 0.0);
    if (r.value < 1e-12) CHECK(cons.max_violation(target) <= kFeasTol);

    // No sampled feasible point does better.
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int s = 0; s < 200; ++s) {
      Vec z(dim);
      for (int k = 0; k < dim; ++k) z(k) = u(rng);
      if (cons.max_violation(z) > 0.0) continue;
      CHECK((z - target).dot(S * (z - target)) >= r.value - 1e-9);
    }

    // Adding a constraint never lowers the optimum.
    LinConstraintSet tighter = cons;
    Vec a(dim);
    for (int k = 0; k < dim; ++k) a(k) = g(rng);
    tighter.add_row(a, 0.3);
    const SolveStatus r2 = solve_qp(S, target, tighter);
    if (r2.optimal()) CHECK(r2.value >= r.value - 1e-9);
  }
}

TEST_CASE("support function") {
  CHECK(support(unit_square(), Vec::Unit(2, 0)) == doctest::Approx(1.0));
  CHECK(support(unit_square(), Vec::Ones(2)) == doctest::Approx(2.0));
  LinConstraintSet diamond(2);
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {1.0, -1.0}) {
      Vec a(2);
      a << s1, s2;
      diamond.add_row(a, 1.0);
    }
  }
  CHECK(support(diamond, Vec::Unit(2, 0)) == doctest::Approx(1.0));

  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cons = random_cons(rng, 3, 4);
    Vec d(3);
    d << g(rng), g(rng), g(rng);
    const double alpha = 0.1 + std::abs(g(rng)) * 5.0;
    CHECK(support(cons, alpha * d) == doctest::Approx(alpha * support(cons, d)).epsilon(1e-9));
  }

  LinConstraintSet half(2);
  half.add_row(Vec::Unit(2, 0), 1.0);
  try {
    support(half, Vec::Unit(2, 1));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnboundedDirection);
  }
  LinConstraintSet empty(1);
  empty.add_row(Vec::Constant(1, 1.0), -1.0);
  empty.add_row(Vec::Constant(1, -1.0), -1.0);
  try {
    support(empty, Vec::Constant(1, 1.0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
}

TEST_CASE("solve_qp projects onto a thin sliver with near-parallel faces") {
  // Two faces differ by under 0.1 degrees; the KKT system at their vertex is
  // ill-conditioned and its rounding residue must not be taken as a step.
  LinConstraintSet c(2);
  Vec a(2);
  a << -0.081362009454913009, -0.99668461582260748;
  c.add_row(a, 12.04666252491614);
  a << 0.079745222282889813, 0.99681527853612506;
  c.add_row(a, -12.300700537135835);
  a << 1, 0;
  c.add_row(a, 1000);
  Vec target(2);
  target << 18, -4;
  const SolveStatus r = solve_qp(Mat::Identity(2, 2), target, c);
  REQUIRE(r.optimal());
  CHECK(c.max_violation(r.point) <= 1e-7);
  // The nearest point is the wedge apex: both slanted faces are active.
  CHECK(std::abs(c.A.row(0).dot(r.point) - c.b(0)) <= 1e-6);
  CHECK(std::abs(c.A.row(1).dot(r.point) - c.b(1)) <= 1e-6);
}

TEST_CASE("solve_lp on a nearly unbounded polytope") {
  // Rows of a robot-scenario intermediate set: rounding noise leaves a
  // direction along which the region extends past any working scale.
  const double rows[][5] = {
      {0.31622776601686331, 0.63245553203365412, 0.31622776601686242, 0.63245553203367277, -2.8460498941514789},
      {1.1143863609675012e-14, 0.89442719099992063, -5.4296844798074072e-16, -0.44721359549994849, 4.0249223594994659},
      {-0.70894444809398682, 0.54534188314919707, 0.35447222404699313, -0.27267094157459842, 2.3722371916993819},
      {-0.6618225213558091, -0.60165683759618305, 0.33091126067790433, 0.30082841879809141, -2.1358817734662452},
      {-0.13968605915393123, -0.69843029576956694, 0.069843029576965518, -0.6984302957695856, 2.7238781535013383},
      {-0.092221731510354954, 0.29510954084024638, 0.046110865755177324, -0.94988383458273418, 9.9507248302245603},
      {-0.074897962515577551, 0.89128575395942189, 0.037448981257788665, -0.44564287697971106, 5.9637502654522896},
      {0.40265428699557865, 0.62228389808115125, 0.59483019669502379, -0.31114194904057685, 5.7561260572441055},
      {-0.12777531299659775, 0.25555062600023598, 2.081668171172168e-16, -0.95831484750029261, 10.094249726985835},
      {1.1890488593735427e-13, 0.40613846605276083, -5.9591220846755277e-14, -0.91381154862056235, 9.7473231852842925},
      {-0.51440120507057951, 0.58298803241550456, -0.55726797216178603, -0.291494016207752, 5.5298129545198043},
      {-0.42073165743517671, 0.66114974739838173, -0.52591457179438306, -0.33057487369919064, 5.8752170734720632},
      {1.9817480989559044e-14, 0.8944271909993472, -1.1518563880485999e-14, 0.44721359550109552, 0.67082039324120002},
      {0.42073165743569019, 0.66114974739823751, 0.52591457179419809, -0.33057487369911992, 5.8752170734712292},
      {0.51214751973160244, 0.51214751973148664, 0.64018439966446317, 0.25607375986599162, 2.1766269588577125},
      {-0.44721359551139417, -0.89442719099419787, 3.2901459334766519e-13, -6.1343760626719767e-10, -0.89442718490501072},
      {-1.9602375278537915e-13, 2.607514204555627e-11, 9.7678809485302029e-14, -1, 10.000000000021574},
      {0.092221731507583726, 0.29510954084164343, -0.04611086575379212, -0.94988383458263648, 9.9507248302395919},
      {-0.76626102835083176, -0.38313051338098586, -0.47891314303979327, 0.19156525669049337, -0.67047839398832709},
      {-0.40265428699637701, 0.62228389808180695, -0.59483019669362669, -0.31114194904090314, 5.7561260572541562},
      {0.1277753129928042, 0.25555062600280637, -1.471045507628332e-15, -0.95831484750011298, 10.094249726998141},
      {0.37662178860972867, 0.90389229262864357, -0.18831089430486433, -0.075324356997227865, 2.0714198301236992},
  };
  LinConstraintSet c(4);
  for (const auto& r : rows) c.add_row((Vec(4) << r[0], r[1], r[2], r[3]).finished(), r[4]);
  Vec cost = Vec::Zero(4);
  cost(1) = 1.0;
  const SolveStatus r = solve_lp(cost, c);
  if (r.optimal()) {
    CHECK(c.max_violation(r.point) <= 1e-6);
  } else {
    CHECK(r.kind == SolveStatus::Kind::kUnbounded);
  }
}
