#include <doctest.h>

#include <cmath>
#include <random>

#include "actgov/error.hpp"
#include "actgov/polytope.hpp"
#include "actgov/set_json.hpp"
#include "test_util.hpp"

using namespace actgov;
using namespace actgov::testing;

namespace {

Polytope hexagon() {
  Polytope P(2);
  for (int k = 0; k < 6; ++k) {
    const double th = M_PI / 3.0 * k;
    P.add_row(vec2(std::cos(th), std::sin(th)), 1.0);
  }
  return P;
}

Polytope diamond() {
  Polytope P(2);
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {1.0, -1.0}) P.add_row(vec2(s1, s2), 1.0);
  }
  return P;
}

bool has_point(const std::vector<Vec>& pts, const Vec& x, double tol = 1e-9) {
  for (const Vec& p : pts) {
    if ((p - x).cwiseAbs().maxCoeff() <= tol) return true;
  }
  return false;
}

// Membership in P (+) Q by an LP over the decomposition x = p + q.
bool in_minkowski_sum(const Polytope& P, const Polytope& Q, const Vec& x) {
  const int n = P.dim();
  LinConstraintSet c(n);
  // q in Q and x - q in P.
  for (int i = 0; i < Q.rows(); ++i) c.add_row(Q.A().row(i).transpose(), Q.b()(i) + 1e-9);
  for (int i = 0; i < P.rows(); ++i) {
    c.add_row(-P.A().row(i).transpose(), P.b()(i) - P.A().row(i).dot(x) + 1e-9);
  }
  return solve_lp(Vec::Zero(n), c).optimal();
}

PolyUnion union_of(std::vector<Polytope> parts) {
  const int n = parts.front().dim();
  return PolyUnion(n, std::move(parts));
}

}  // namespace

TEST_CASE("canonicalize") {
  SUBCASE("dominated row") {
    Polytope P(1);
    P.add_row(Vec::Constant(1, 1.0), 1.0);
    P.add_row(Vec::Constant(1, 1.0), 2.0);
    auto [C, empty] = canonicalize(P);
    CHECK_FALSE(empty);
    REQUIRE(C.rows() == 1);
    CHECK(C.b()(0) == doctest::Approx(1.0));
  }
  SUBCASE("empty") {
    Polytope P(1);
    P.add_row(Vec::Constant(1, 1.0), 0.0);
    P.add_row(Vec::Constant(1, -1.0), -1.0);
    CHECK(canonicalize(P).second);
  }
  SUBCASE("hexagon with duplicated rows") {
    std::mt19937 rng(5);
    Polytope P = hexagon();
    const Polytope original = P;
    P.add_row(P.A().row(0).transpose() * 3.0, 3.0);
    P.add_row(P.A().row(2).transpose(), 1.5);
    P.add_row(P.A().row(4).transpose(), 1.0);
    auto [C, empty] = canonicalize(P);
    CHECK_FALSE(empty);
    CHECK(C.rows() == 6);
    int disagreements = 0;
    for (int s = 0; s < 10000; ++s) {
      const Vec x = uniform_point(rng, Vec::Constant(2, -1.5), Vec::Constant(2, 1.5));
      if (original.contains(x) != C.contains(x)) ++disagreements;
    }
    CHECK(disagreements == 0);
    auto [C2, e2] = canonicalize(C);
    CHECK(C2.rows() == C.rows());
    CHECK((C2.A() - C.A()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((C2.b() - C.b()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("vertices") {
  SUBCASE("unit square") {
    const auto v = vertices(box2(0, 1, 0, 1));
    CHECK(v.size() == 4);
    CHECK(has_point(v, vec2(0, 0)));
    CHECK(has_point(v, vec2(1, 1)));
  }
  SUBCASE("simplex") {
    Polytope P(2);
    P.add_row(vec2(-1, 0), 0);
    P.add_row(vec2(0, -1), 0);
    P.add_row(vec2(1, 1), 1);
    const auto v = vertices(P);
    REQUIRE(v.size() == 3);
    CHECK(has_point(v, vec2(0, 0)));
    CHECK(has_point(v, vec2(1, 0)));
    CHECK(has_point(v, vec2(0, 1)));
  }
  SUBCASE("random 3-D polytope") {
    std::mt19937 rng(17);
    const Polytope P = random_polytope(rng, Vec::Zero(3), 12, 0.5, 2.0);
    const auto v = vertices(P);
    REQUIRE(v.size() >= 4);
    for (const Vec& x : v) {
      Mat active(0, 3);
      for (int i = 0; i < P.rows(); ++i) {
        if (std::abs(P.A().row(i).dot(x) - P.b()(i)) < 1e-8) {
          active.conservativeResize(active.rows() + 1, Eigen::NoChange);
          active.row(active.rows() - 1) = P.A().row(i);
        }
      }
      CHECK(Eigen::FullPivLU<Mat>(active).rank() == 3);
    }
    const Polytope H = hull(v);
    int disagreements = 0;
    for (int s = 0; s < 10000; ++s) {
      const Vec x = uniform_point(rng, Vec::Constant(3, -2.2), Vec::Constant(3, 2.2));
      if (P.contains(x) != H.contains(x)) {
        if (distance_to_part_faces(PolyUnion(P), x) > 1e-6) ++disagreements;
      }
    }
    CHECK(disagreements == 0);
  }
  SUBCASE("errors") {
    Polytope half(2);
    half.add_row(vec2(1, 0), 1);
    try {
      vertices(half);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnboundedPolytope);
    }
    try {
      vertices(Polytope::empty(2));
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kEmptyPolytope);
    }
  }
}

TEST_CASE("hull") {
  SUBCASE("simplex") {
    const Polytope H = hull({vec2(0, 0), vec2(1, 0), vec2(0, 1)});
    CHECK(H.rows() == 3);
    CHECK(H.contains(vec2(0.2, 0.2)));
    CHECK_FALSE(H.contains(vec2(0.6, 0.6)));
  }
  SUBCASE("1-D") {
    const Polytope H = hull({Vec::Constant(1, 0.0), Vec::Constant(1, 2.0)});
    CHECK(set_equal(PolyUnion(H), PolyUnion(interval(0, 2))));
  }
  SUBCASE("20 random 2-D points") {
    std::mt19937 rng(23);
    std::vector<Vec> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(uniform_point(rng, Vec::Constant(2, -1), Vec::Ones(2)));
    const Polytope H = hull(pts);
    for (const Vec& p : pts) CHECK(H.contains(p));
    for (const Vec& v : vertices(H)) CHECK(has_point(pts, v, 1e-8));
  }
  SUBCASE("lower-dimensional hulls use equality pairs") {
    const Polytope seg = hull({vec2(0, 0), vec2(1, 1)});
    CHECK(seg.contains(vec2(0.5, 0.5)));
    CHECK_FALSE(seg.contains(vec2(0.5, 0.6)));
    CHECK_FALSE(seg.has_interior());
    const Polytope pt = hull({vec2(3, 4)});
    CHECK(pt.contains(vec2(3, 4)));
    CHECK(vertices(pt).size() == 1);
  }
  SUBCASE("4-D cube") {
    std::vector<Vec> pts;
    for (int mask = 0; mask < 16; ++mask) {
      Vec p(4);
      for (int k = 0; k < 4; ++k) p(k) = (mask >> k) & 1;
      pts.push_back(p);
    }
    pts.push_back(Vec::Constant(4, 0.5));
    const Polytope H = hull(pts);
    CHECK(H.rows() == 8);
    CHECK(vertices(H).size() == 16);
  }
}

TEST_CASE("linear_image") {
  const Polytope sq = box2(0, 1, 0, 1);
  CHECK(set_equal(PolyUnion(linear_image(Mat::Identity(2, 2), sq)), PolyUnion(sq)));

  // ACC input matrix (magnitudes) with dt = 0.25 applied to U = [-2, 2].
  const double dt = 0.25;
  Mat M(2, 1);
  M << 0.5 * dt * dt, dt;
  const auto v = vertices(linear_image(M, interval(-2, 2)));
  REQUIRE(v.size() == 2);
  CHECK(has_point(v, vec2(-0.0625, -0.5), 1e-12));
  CHECK(has_point(v, vec2(0.0625, 0.5), 1e-12));

  std::mt19937 rng(29);
  const Mat R = Mat::Random(2, 2) + 2.0 * Mat::Identity(2, 2);
  const Polytope img = linear_image(R, sq);
  for (int s = 0; s < 500; ++s) {
    const Vec p = uniform_point(rng, Vec::Zero(2), Vec::Ones(2));
    CHECK(img.contains(R * p));
  }
}

TEST_CASE("affine_preimage") {
  const PolyUnion S(box2(0, 2, 0, 2));
  CHECK(set_equal(affine_preimage(Mat::Identity(2, 2), S), S));
  CHECK(set_equal(affine_preimage(2.0 * Mat::Identity(2, 2), S), PolyUnion(box2(0, 1, 0, 1))));
  Mat singular(2, 2);
  singular << 1, 2, 2, 4;
  try {
    affine_preimage(singular, S);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSingularMatrix);
  }
}

TEST_CASE("minkowski_sum") {
  CHECK(set_equal(PolyUnion(minkowski_sum(interval(0, 1), interval(0, 1))),
                  PolyUnion(interval(0, 2))));
  const Polytope point = hull({vec2(5, 5)});
  CHECK(set_equal(PolyUnion(minkowski_sum(box2(0, 1, 0, 1), point)),
                  PolyUnion(box2(5, 6, 5, 6))));

  const Polytope D = diamond();
  const Polytope B = box2(-0.5, 0.5, -0.25, 0.25);
  const Polytope oct = minkowski_sum(D, B);
  CHECK(canonicalize(oct).first.rows() == 8);
  std::mt19937 rng(31);
  int disagreements = 0;
  for (int s = 0; s < 2000; ++s) {
    const Vec x = uniform_point(rng, Vec::Constant(2, -2), Vec::Constant(2, 2));
    if (oct.contains(x) != in_minkowski_sum(D, B, x) &&
        distance_to_part_faces(PolyUnion(oct), x) > 1e-6) {
      ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("pdiff") {
  const Polytope shrunk = pdiff(box2(0, 2, 0, 2), box2(-0.5, 0.5, -0.5, 0.5));
  CHECK(set_equal(PolyUnion(shrunk), PolyUnion(box2(0.5, 1.5, 0.5, 1.5))));
  CHECK(set_equal(PolyUnion(pdiff(hexagon(), hull({vec2(0, 0)}))), PolyUnion(hexagon())));

  const Polytope seg = hull({vec2(-0.3, -0.1), vec2(0.2, 0.4)});
  const Polytope out = pdiff(hexagon(), seg);
  REQUIRE(out.has_interior());
  std::mt19937 rng(37);
  for (int s = 0; s < 2000; ++s) {
    const Vec x = uniform_point(rng, Vec::Constant(2, -1), Vec::Ones(2));
    if (!out.contains(x)) continue;
    std::uniform_real_distribution<double> t(0.0, 1.0);
    const double lam = t(rng);
    const Vec q = lam * vec2(-0.3, -0.1) + (1 - lam) * vec2(0.2, 0.4);
    CHECK(hexagon().contains(x + q));
  }
}

TEST_CASE("region_diff") {
  const PolyUnion S(box2(0, 3, 0, 3));
  CHECK(set_equal(region_diff(S, PolyUnion(2)), S));
  CHECK(region_diff(S, S).empty());

  const PolyUnion T(box2(1, 2, 1, 2));
  const PolyUnion D = region_diff(S, T);
  CHECK(D.size() == 4);
  int disagreements = 0;
  for (int i = 0; i <= 300; ++i) {
    for (int j = 0; j <= 300; ++j) {
      const Vec x = vec2(i * 0.01, j * 0.01);
      const bool expected = S[0].contains(x) && !T[0].contains(x, Strictness::kInterior);
      const bool got = contains(D, x).inside;
      if (expected != got && distance_to_part_faces(T, x) > 1e-9) ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("region_diff matches pointwise difference on random unions") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    PolyUnion S(2), T(2);
    for (int k = 0; k < 3; ++k) {
      S.add(random_polytope(rng, uniform_point(rng, Vec::Constant(2, -1), Vec::Ones(2)), 4, 0.3, 1.0));
      T.add(random_polytope(rng, uniform_point(rng, Vec::Constant(2, -1), Vec::Ones(2)), 4, 0.3, 1.0));
    }
    const PolyUnion D = region_diff(S, T);
    int disagreements = 0;
    for (int s = 0; s < 1000; ++s) {
      const Vec x = uniform_point(rng, Vec::Constant(2, -2.5), Vec::Constant(2, 2.5));
      const bool expected = contains(S, x).inside && !contains(T, x, Strictness::kInterior).inside;
      if (expected != contains(D, x).inside &&
          std::min(distance_to_part_faces(S, x), distance_to_part_faces(T, x)) > 1e-6) {
        ++disagreements;
      }
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("union_pdiff") {
  const Polytope Q = interval(-1, 1);
  SUBCASE("single part equals pdiff") {
    const Polytope P = box2(0, 4, 0, 2);
    const Polytope Q2 = box2(-0.5, 0.5, -0.2, 0.2);
    CHECK(set_equal(union_pdiff(PolyUnion(P), Q2), PolyUnion(pdiff(P, Q2))));
  }
  SUBCASE("two intervals") {
    const PolyUnion S = union_of({interval(0, 4), interval(5, 9)});
    const PolyUnion expected = union_of({interval(1, 3), interval(6, 8)});
    CHECK(set_equal(union_pdiff(S, Q), expected));
  }
  SUBCASE("overlapping intervals behave as their union") {
    const PolyUnion S = union_of({interval(0, 4), interval(3, 9)});
    CHECK(set_equal(union_pdiff(S, Q), PolyUnion(interval(1, 8))));
  }
  SUBCASE("L-shaped union, grid oracle") {
    const PolyUnion L = union_of({box2(0, 3, 0, 1), box2(0, 1, 0, 3)});
    const Polytope small = box2(-0.2, 0.2, -0.1, 0.1);
    const PolyUnion R = union_pdiff(L, small);
    int disagreements = 0;
    for (int i = -5; i <= 35; ++i) {
      for (int j = -5; j <= 35; ++j) {
        const Vec x = vec2(i * 0.1 + 0.013, j * 0.1 + 0.007);
        bool expected = true;
        for (int a = 0; a <= 4 && expected; ++a) {
          for (int b = 0; b <= 4 && expected; ++b) {
            const Vec q = vec2(-0.2 + 0.1 * a, -0.1 + 0.05 * b);
            expected = contains(L, x + q).inside;
          }
        }
        if (expected != contains(R, x).inside && distance_to_part_faces(R, x) > 1e-6) {
          ++disagreements;
        }
      }
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("convhull_union") {
  CHECK(set_equal(PolyUnion(convhull_union(PolyUnion(box2(0, 1, 0, 1)))), PolyUnion(box2(0, 1, 0, 1))));
  CHECK(set_equal(PolyUnion(convhull_union(union_of({interval(0, 1), interval(2, 3)}))),
                  PolyUnion(interval(0, 3))));
  const PolyUnion three = union_of({box2(0, 1, 0, 1), box2(3, 4, 0, 1), box2(1, 2, 3, 4)});
  const Polytope H = convhull_union(three);
  std::vector<Vec> part_vertices;
  for (const Polytope& p : three) {
    for (const Vec& v : vertices(p)) part_vertices.push_back(v);
  }
  for (const Vec& v : part_vertices) CHECK(H.contains(v));
  for (const Vec& v : vertices(H)) CHECK(has_point(part_vertices, v, 1e-8));
}

TEST_CASE("contains") {
  const PolyUnion S = union_of({box2(0, 1, 0, 1), box2(1, 2, 0, 1)});
  const Membership m = contains(S, vec2(0.5, 0.5));
  CHECK(m.inside);
  CHECK(m.witness_part == 0);
  CHECK_FALSE(contains(S, vec2(5, 5)).inside);
  CHECK(contains(S, vec2(1, 0.5), Strictness::kClosure).inside);
  CHECK_FALSE(contains(S, vec2(1, 0.5), Strictness::kInterior).inside);

  Polytope open = box2(0, 1, 0, 1).with_strictness(true);
  CHECK_FALSE(open.contains(vec2(1, 0.5), Strictness::kRespect));
  CHECK(open.contains(vec2(1, 0.5), Strictness::kClosure));
}

TEST_CASE("set_equal") {
  const PolyUnion S(box2(0, 2, 0, 1));
  CHECK(set_equal(S, S));
  CHECK(set_equal(S, union_of({box2(0, 1, 0, 1), box2(1, 2, 0, 1)})));
  CHECK_FALSE(set_equal(PolyUnion(interval(0, 1)), PolyUnion(interval(0, 1 + 1e-3))));
}

TEST_CASE("increasing chains: union_pdiff distributes over the union") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<PolyUnion> chain;
    PolyUnion acc(n);
    for (int k = 0; k < 3; ++k) {
      acc.add(random_polytope(rng, uniform_point(rng, Vec::Constant(n, -2), Vec::Constant(n, 2)), 2, 0.5, 1.5));
      chain.push_back(acc);
    }
    const Polytope Q = Polytope::box(-0.3 * Vec::Ones(n), 0.2 * Vec::Ones(n));
    PolyUnion rhs(n);
    for (const PolyUnion& X : chain) rhs.append(union_pdiff(X, Q));
    CHECK(set_equal(union_pdiff(chain.back(), Q), rhs));
  }
}

TEST_CASE("pdiff then Minkowski sum stays inside") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const Polytope P = random_polytope(rng, Vec::Zero(n), 6, 1.0, 2.0);
    const Polytope Q = random_polytope(rng, Vec::Zero(n), 3, 0.1, 0.4);
    const Polytope D = pdiff(P, Q);
    if (!D.has_interior()) continue;
    CHECK(is_subset(minkowski_sum(D, Q), P));
  }
}

TEST_CASE("operations are representation independent") {
  const Polytope whole = box2(0, 4, 0, 3);
  const PolyUnion split = union_of({box2(0, 2.5, 0, 3), box2(2.5, 4, 0, 3)});
  const Polytope Q = box2(-0.4, 0.4, -0.2, 0.2);
  CHECK(set_equal(union_pdiff(PolyUnion(whole), Q), union_pdiff(split, Q)));
  const PolyUnion hole(box2(1, 2, 1, 2));
  CHECK(set_equal(region_diff(PolyUnion(whole), hole), region_diff(split, hole)));
}

TEST_CASE("simplify merges convex unions") {
  const PolyUnion split = union_of({box2(0, 1, 0, 1), box2(1, 2, 0, 1), box2(0.2, 0.5, 0.2, 0.5)});
  const PolyUnion s = simplify(split);
  CHECK(s.size() == 1);
  CHECK(set_equal(s, split));
  const PolyUnion L = union_of({box2(0, 3, 0, 1), box2(0, 1, 0, 3)});
  CHECK(simplify(L).size() == 2);
}

TEST_CASE("set JSON round trip") {
  PolyUnion S = union_of({box2(0, 1, 0, 1).with_strictness(true), hexagon()});
  const auto j = set_to_json(S);
  const PolyUnion back = set_from_json(nlohmann::json::parse(j.dump()));
  CHECK(set_equal(S, back));
  CHECK(back[0].strict(0));
  CHECK_FALSE(back[1].strict(0));
  CHECK_THROWS_AS(set_from_json(nlohmann::json::parse(R"({"dim": 2})")), Error);
  CHECK_THROWS_AS(set_from_json(nlohmann::json::parse(R"({"dim": 2, "parts": [{"A": [[1]], "b": [1]}]})")), Error);
}

TEST_CASE("distance") {
  CHECK(distance(box2(0, 1, 0, 1), vec2(2, 1)) == doctest::Approx(1.0));
  CHECK(distance(box2(0, 1, 0, 1), vec2(0.5, 0.5)) == 0.0);
}

TEST_CASE("hull of clustered planar points keeps every facet") {
  // Many points within 1e-4 of one corner plus a few far ones.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> tiny(-1e-4, 1e-4);
  std::vector<Vec> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(vec2(2 + std::abs(tiny(rng)), tiny(rng)));
  pts.push_back(vec2(1000, 5));
  pts.push_back(vec2(1000, -5));
  pts.push_back(vec2(500, 6));
  const Polytope H = hull(pts);
  REQUIRE(H.is_bounded());
  for (const Vec& p : pts) CHECK(H.contains(p, Strictness::kClosure));
  CHECK(!H.contains(vec2(1.99, 0), Strictness::kClosure));
  CHECK(!H.contains(vec2(500, 6.1), Strictness::kClosure));
  CHECK(H.contains(vec2(600, 0), Strictness::kClosure));
}

TEST_CASE("hull of a flat polygon embedded in 3-D") {
  std::vector<Vec> pts;
  for (int k = 0; k < 6; ++k) {
    const double t = 2 * M_PI * k / 6;
    pts.push_back((Vec(3) << std::cos(t), std::sin(t), 0.5).finished());
  }
  const Polytope H = hull(pts);
  CHECK(H.contains((Vec(3) << 0, 0, 0.5).finished(), Strictness::kClosure));
  CHECK(!H.contains((Vec(3) << 0, 0, 0.6).finished(), Strictness::kClosure));
  CHECK(!H.contains((Vec(3) << 1.1, 0, 0.5).finished(), Strictness::kClosure));
  CHECK(vertices(H).size() == 6);
}
