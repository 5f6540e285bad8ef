#include "actgov/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "actgov/error.hpp"

namespace actgov {

namespace {

double row_tol(double offset) { return 1e-9 * std::max(1.0, std::abs(offset)); }

}  // namespace

Polytope::Polytope(int dim) : cons_(dim) {}

Polytope::Polytope(Mat A, Vec b) : cons_(std::move(A), std::move(b)) {
  strict_.assign(cons_.rows(), false);
}

Polytope::Polytope(Mat A, Vec b, std::vector<bool> strict)
    : cons_(std::move(A), std::move(b)), strict_(std::move(strict)) {
  if (static_cast<int>(strict_.size()) != cons_.rows()) {
    fail(ErrorKind::kDimensionMismatch, "strict flags do not match row count");
  }
}

Polytope::Polytope(LinConstraintSet cons) : cons_(std::move(cons)) {
  strict_.assign(cons_.rows(), false);
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size()) {
    fail(ErrorKind::kDimensionMismatch, "box bounds differ in length");
  }
  const int n = static_cast<int>(lo.size());
  Mat A(2 * n, n);
  A << Mat::Identity(n, n), -Mat::Identity(n, n);
  Vec b(2 * n);
  b << hi, -lo;
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::empty(int dim) {
  Polytope P(dim);
  P.add_row(Vec::Zero(dim), -1.0);
  return P;
}

void Polytope::add_row(const Vec& normal, double offset, bool strict) {
  cons_.add_row(normal, offset);
  strict_.push_back(strict);
}

Polytope Polytope::intersect(const Polytope& other) const {
  if (other.dim() != dim()) {
    fail(ErrorKind::kDimensionMismatch, "intersecting polytopes of different dimension");
  }
  Mat A(rows() + other.rows(), dim());
  A << cons_.A, other.cons_.A;
  Vec b(rows() + other.rows());
  b << cons_.b, other.cons_.b;
  std::vector<bool> s = strict_;
  s.insert(s.end(), other.strict_.begin(), other.strict_.end());
  return Polytope(std::move(A), std::move(b), std::move(s));
}

Polytope Polytope::with_strictness(bool strict) const {
  Polytope out = *this;
  out.strict_.assign(rows(), strict);
  return out;
}

Polytope Polytope::negated() const {
  return Polytope(-cons_.A, cons_.b, strict_);
}

bool Polytope::is_empty() const {
  if (rows() == 0) return false;
  return !solve_lp(Vec::Zero(dim()), cons_).optimal();
}

double Polytope::chebyshev_radius() const {
  const int n = dim();
  if (rows() == 0) return 1.0;
  LinConstraintSet ball(n + 1);
  for (int i = 0; i < rows(); ++i) {
    Vec row(n + 1);
    row.head(n) = cons_.A.row(i).transpose();
    row(n) = cons_.A.row(i).norm();
    ball.add_row(row, cons_.b(i));
  }
  ball.add_row(Vec::Unit(n + 1, n), 1.0);
  const SolveStatus r = solve_lp(-Vec::Unit(n + 1, n), ball);
  if (!r.optimal()) return -std::numeric_limits<double>::infinity();
  return r.point(n);
}

bool Polytope::is_bounded() const {
  for (int k = 0; k < dim(); ++k) {
    for (double s : {1.0, -1.0}) {
      const SolveStatus r = solve_lp(s * Vec::Unit(dim(), k), cons_);
      if (r.kind == SolveStatus::Kind::kInfeasible) return true;
      if (r.kind == SolveStatus::Kind::kUnbounded) return false;
    }
  }
  return true;
}

bool Polytope::contains(const Vec& x, Strictness mode) const {
  if (x.size() != dim()) {
    fail(ErrorKind::kDimensionMismatch, "point dimension does not match polytope");
  }
  for (int i = 0; i < rows(); ++i) {
    const double tol = kMemTol * cons_.A.row(i).norm();
    const bool open = mode == Strictness::kInterior ||
                      (mode == Strictness::kRespect && strict_[i]);
    const double lhs = cons_.A.row(i).dot(x);
    if (open ? lhs > cons_.b(i) - tol : lhs > cons_.b(i) + tol) return false;
  }
  return true;
}

PolyUnion::PolyUnion(int dim, std::vector<Polytope> parts) : dim_(dim) {
  for (auto& p : parts) add(std::move(p));
}

PolyUnion::PolyUnion(Polytope part) : dim_(part.dim()) { add(std::move(part)); }

void PolyUnion::add(Polytope part) {
  if (part.dim() != dim_) {
    fail(ErrorKind::kDimensionMismatch, "union part has dimension " +
                                            std::to_string(part.dim()) +
                                            ", expected " + std::to_string(dim_));
  }
  if (part.is_empty()) return;
  parts_.push_back(std::move(part));
}

void PolyUnion::append(const PolyUnion& other) {
  if (other.dim() != dim_) {
    fail(ErrorKind::kDimensionMismatch, "appending union of different dimension");
  }
  parts_.insert(parts_.end(), other.parts_.begin(), other.parts_.end());
}

std::pair<Polytope, bool> canonicalize(const Polytope& P) {
  const int n = P.dim();
  struct Row {
    Vec a;
    double b;
    bool strict;
  };
  std::vector<Row> rows;
  for (int i = 0; i < P.rows(); ++i) {
    const double norm = P.A().row(i).norm();
    if (norm < 1e-12) {
      if (P.b()(i) < -1e-12) return {Polytope::empty(n), true};
      continue;
    }
    rows.push_back({P.A().row(i).transpose() / norm, P.b()(i) / norm, P.strict(i)});
  }

  // Parallel duplicates keep the tightest offset.
  std::vector<Row> unique;
  for (auto& r : rows) {
    bool merged = false;
    for (auto& u : unique) {
      if ((u.a - r.a).cwiseAbs().maxCoeff() < 1e-12) {
        if (r.b < u.b - row_tol(u.b)) {
          u = r;
        } else if (r.b <= u.b + row_tol(u.b)) {
          u.strict = u.strict || r.strict;
        }
        merged = true;
        break;
      }
    }
    if (!merged) unique.push_back(std::move(r));
  }

  auto build = [n](const std::vector<Row>& rs, int skip) {
    LinConstraintSet c(n);
    for (int i = 0; i < static_cast<int>(rs.size()); ++i) {
      if (i != skip) c.add_row(rs[i].a, rs[i].b);
    }
    return c;
  };

  if (!unique.empty() && !solve_lp(Vec::Zero(n), build(unique, -1)).optimal()) {
    return {Polytope::empty(n), true};
  }

  for (int i = 0; i < static_cast<int>(unique.size());) {
    const SolveStatus r = solve_lp(-unique[i].a, build(unique, i));
    if (r.optimal() && -r.value <= unique[i].b + row_tol(unique[i].b)) {
      unique.erase(unique.begin() + i);
    } else {
      ++i;
    }
  }

  Polytope out(n);
  for (const auto& r : unique) out.add_row(r.a, r.b, r.strict);
  return {std::move(out), false};
}

Polytope linear_image(const Mat& M, const Polytope& P) {
  if (M.cols() != P.dim()) {
    fail(ErrorKind::kDimensionMismatch, "linear map columns do not match polytope dimension");
  }
  std::vector<Vec> pts;
  for (const Vec& v : vertices(P)) pts.push_back(M * v);
  return hull(pts);
}

PolyUnion affine_preimage(const Mat& A, const PolyUnion& S) {
  if (A.rows() != A.cols() || A.rows() != S.dim()) {
    fail(ErrorKind::kDimensionMismatch, "preimage map must be square and match the set");
  }
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0 || sv(sv.size() - 1) / sv(0) < 1e-12) {
    fail(ErrorKind::kSingularMatrix, "state matrix is singular (reciprocal condition below 1e-12)");
  }
  PolyUnion out(S.dim());
  for (const Polytope& part : S) {
    out.add(Polytope(part.A() * A, part.b(), part.strict()));
  }
  return out;
}

Polytope minkowski_sum(const Polytope& P, const Polytope& Q) {
  if (P.dim() != Q.dim()) {
    fail(ErrorKind::kDimensionMismatch, "Minkowski sum of different dimensions");
  }
  const std::vector<Vec> vp = vertices(P);
  const std::vector<Vec> vq = vertices(Q);
  std::vector<Vec> pts;
  pts.reserve(vp.size() * vq.size());
  for (const Vec& p : vp) {
    for (const Vec& q : vq) pts.push_back(p + q);
  }
  return hull(pts);
}

Polytope pdiff(const Polytope& P, const Polytope& Q) {
  if (P.dim() != Q.dim()) {
    fail(ErrorKind::kDimensionMismatch, "P-difference of different dimensions");
  }
  if (Q.is_empty()) fail(ErrorKind::kEmptyPolytope, "P-difference by an empty set");
  Polytope tightened(P.dim());
  for (int i = 0; i < P.rows(); ++i) {
    const Vec a = P.A().row(i).transpose();
    tightened.add_row(a, P.b()(i) - support(Q.cons(), a), P.strict(i));
  }
  return canonicalize(tightened).first;
}

namespace {

// Closure of piece \ q as a list of pieces with nonempty interior.
// Assumes the interiors of piece and q intersect.
std::vector<Polytope> subtract(const Polytope& piece, const Polytope& q) {
  std::vector<Polytope> out;
  Polytope acc = piece;
  for (int i = 0; i < q.rows(); ++i) {
    const Vec a = q.A().row(i).transpose();
    Polytope cand = acc;
    cand.add_row(-a, -q.b()(i), !q.strict(i));
    if (cand.has_interior()) out.push_back(canonicalize(cand).first);
    acc.add_row(a, q.b()(i), q.strict(i));
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Polytope with its axis-aligned bounding box (infinite where unbounded).
struct BoxedPart {
  Polytope part;
  Vec lo, hi;
};

BoxedPart boxed(Polytope p) {
  const int n = p.dim();
  BoxedPart out{std::move(p), Vec::Constant(n, -kInf), Vec::Constant(n, kInf)};
  for (int k = 0; k < n; ++k) {
    const SolveStatus up = solve_lp(-Vec::Unit(n, k), out.part.cons());
    if (up.optimal()) out.hi(k) = -up.value;
    const SolveStatus down = solve_lp(Vec::Unit(n, k), out.part.cons());
    if (down.optimal()) out.lo(k) = down.value;
  }
  return out;
}

// Conservative: false only when the closures are certainly disjoint.
bool boxes_overlap(const BoxedPart& a, const BoxedPart& b) {
  for (int k = 0; k < a.lo.size(); ++k) {
    const double tol = kFeasTol * std::max({1.0, std::abs(a.hi(k)), std::abs(b.hi(k))});
    if (a.hi(k) < b.lo(k) + tol || b.hi(k) < a.lo(k) + tol) return false;
  }
  return true;
}

double box_tol(const BoxedPart& a, const BoxedPart& b, int k) {
  return kFeasTol * std::max({1.0, std::abs(a.hi(k)), std::abs(a.lo(k)), std::abs(b.hi(k)),
                              std::abs(b.lo(k))});
}

// Closed boxes intersect (touching counts).
bool boxes_touch(const BoxedPart& a, const BoxedPart& b) {
  for (int k = 0; k < a.lo.size(); ++k) {
    const double tol = box_tol(a, b, k);
    if (a.hi(k) < b.lo(k) - tol || b.hi(k) < a.lo(k) - tol) return false;
  }
  return true;
}

// Box of a lies inside box of b (necessary for a subset of b).
bool box_within(const BoxedPart& a, const BoxedPart& b) {
  for (int k = 0; k < a.lo.size(); ++k) {
    const double tol = box_tol(a, b, k);
    if (a.lo(k) < b.lo(k) - tol || a.hi(k) > b.hi(k) + tol) return false;
  }
  return true;
}

}  // namespace

PolyUnion region_diff(const PolyUnion& S, const PolyUnion& T) {
  if (S.dim() != T.dim()) {
    fail(ErrorKind::kDimensionMismatch, "region difference of different dimensions");
  }
  std::vector<BoxedPart> subtrahends;
  for (const Polytope& q : T) {
    auto [c, empty] = canonicalize(q);
    if (!empty) subtrahends.push_back(boxed(std::move(c)));
  }
  PolyUnion out(S.dim());
  for (const Polytope& part : S) {
    if (!part.has_interior()) continue;
    std::vector<BoxedPart> pieces{boxed(part)};
    for (const BoxedPart& q : subtrahends) {
      std::vector<BoxedPart> next;
      for (BoxedPart& piece : pieces) {
        if (!boxes_overlap(piece, q)) {
          next.push_back(std::move(piece));
          continue;
        }
        if (!piece.part.intersect(q.part).has_interior()) {
          next.push_back(std::move(piece));
          continue;
        }
        for (Polytope& p : subtract(piece.part, q.part)) next.push_back(boxed(std::move(p)));
      }
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    for (BoxedPart& p : pieces) out.add(std::move(p.part));
  }
  return out;
}

Polytope convhull_union(const PolyUnion& S) {
  if (S.empty()) return Polytope::empty(S.dim());
  std::vector<Vec> pts;
  for (const Polytope& part : S) {
    for (Vec& v : vertices(part)) pts.push_back(std::move(v));
  }
  return hull(pts);
}

PolyUnion union_pdiff(const PolyUnion& S, const Polytope& Q) {
  if (S.dim() != Q.dim()) {
    fail(ErrorKind::kDimensionMismatch, "P-difference of different dimensions");
  }
  PolyUnion out(S.dim());
  if (S.empty()) return out;
  if (S.size() == 1) {
    Polytope d = pdiff(S[0], Q);
    if (d.has_interior()) out.add(std::move(d));
    return out;
  }
  const Polytope H = convhull_union(S);
  const Polytope D = pdiff(H, Q);
  if (!D.has_interior()) return out;
  const PolyUnion E = region_diff(PolyUnion(H), S);
  const Polytope negQ = Q.negated();
  PolyUnion F(S.dim());
  for (const Polytope& e : E) F.add(minkowski_sum(e, negQ));
  return region_diff(PolyUnion(D), F);
}

Membership contains(const PolyUnion& S, const Vec& x, Strictness mode) {
  if (x.size() != S.dim()) {
    fail(ErrorKind::kDimensionMismatch, "point dimension does not match union");
  }
  for (int i = 0; i < S.size(); ++i) {
    if (S[i].contains(x, mode)) return {true, i};
  }
  return {};
}

bool is_subset(const PolyUnion& S, const PolyUnion& T) {
  return region_diff(S, T).empty();
}

bool set_equal(const PolyUnion& S, const PolyUnion& T) {
  return is_subset(S, T) && is_subset(T, S);
}

bool is_subset(const Polytope& P, const Polytope& Q) {
  if (P.is_empty()) return true;
  for (int i = 0; i < Q.rows(); ++i) {
    const SolveStatus r = solve_lp(-Q.A().row(i).transpose(), P.cons());
    if (!r.optimal()) return false;
    const double tol = kFeasTol * std::max(1.0, std::abs(Q.b()(i))) * std::max(1.0, Q.A().row(i).norm());
    if (-r.value > Q.b()(i) + tol) return false;
  }
  return true;
}

PolyUnion intersect(const PolyUnion& S, const Polytope& P) {
  PolyUnion out(S.dim());
  for (const Polytope& part : S) {
    Polytope both = part.intersect(P);
    if (both.has_interior()) out.add(canonicalize(both).first);
  }
  return out;
}

namespace {

// Rows of `from` that are valid for `other` (supporting halfspaces).
void envelope_rows(const Polytope& from, const Polytope& other, Polytope& env) {
  for (int i = 0; i < from.rows(); ++i) {
    const Vec a = from.A().row(i).transpose();
    const SolveStatus r = solve_lp(-a, other.cons());
    if (r.optimal() && -r.value <= from.b()(i) + row_tol(from.b()(i))) {
      env.add_row(a, from.b()(i), from.strict(i));
    }
  }
}

std::optional<Polytope> try_merge(const Polytope& P, const Polytope& Q) {
  if (P.intersect(Q).is_empty()) return std::nullopt;
  Polytope env(P.dim());
  envelope_rows(P, Q, env);
  envelope_rows(Q, P, env);
  PolyUnion both(P.dim());
  both.add(P);
  both.add(Q);
  if (!region_diff(PolyUnion(env), both).empty()) return std::nullopt;
  return canonicalize(env).first;
}

}  // namespace

PolyUnion simplify(const PolyUnion& S) {
  std::vector<BoxedPart> parts;
  std::vector<int> ids;
  int next_id = 0;
  for (const Polytope& p : S) {
    if (!p.has_interior()) continue;
    parts.push_back(boxed(canonicalize(p).first));
    ids.push_back(next_id++);
  }

  for (int i = 0; i < static_cast<int>(parts.size());) {
    bool covered = false;
    for (int j = 0; j < static_cast<int>(parts.size()) && !covered; ++j) {
      if (j != i && box_within(parts[i], parts[j]) && is_subset(parts[i].part, parts[j].part)) {
        covered = true;
      }
    }
    if (covered) {
      parts.erase(parts.begin() + i);
      ids.erase(ids.begin() + i);
    } else {
      ++i;
    }
  }

  // Parts covered by the union of the remaining overlapping parts.
  for (int i = static_cast<int>(parts.size()) - 1; i >= 0; --i) {
    PolyUnion others(S.dim());
    for (int j = 0; j < static_cast<int>(parts.size()); ++j) {
      if (j != i && boxes_overlap(parts[i], parts[j])) others.add(parts[j].part);
    }
    if (others.size() >= 2 && region_diff(PolyUnion(parts[i].part), others).empty()) {
      parts.erase(parts.begin() + i);
      ids.erase(ids.begin() + i);
    }
  }

  std::set<std::pair<int, int>> tried;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < parts.size() && !changed; ++i) {
      for (size_t j = i + 1; j < parts.size() && !changed; ++j) {
        if (!boxes_touch(parts[i], parts[j])) continue;
        if (!tried.insert(std::minmax(ids[i], ids[j])).second) continue;
        if (auto merged = try_merge(parts[i].part, parts[j].part)) {
          parts[i] = boxed(std::move(*merged));
          ids[i] = next_id++;
          parts.erase(parts.begin() + j);
          ids.erase(ids.begin() + j);
          changed = true;
        }
      }
    }
  }

  PolyUnion out(S.dim());
  for (auto& e : parts) out.add(std::move(e.part));
  return out;
}

double distance(const Polytope& P, const Vec& x) {
  const SolveStatus r = solve_qp(Mat::Identity(P.dim(), P.dim()), x, P.cons());
  if (!r.optimal()) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(r.value, 0.0));
}

}  // namespace actgov
