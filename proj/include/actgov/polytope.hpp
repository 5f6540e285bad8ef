#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "actgov/optimize.hpp"

namespace actgov {

/// Membership tolerance. Strict rows are tested as a.x <= b - kMemTol.
inline constexpr double kMemTol = 1e-7;
/// A part whose Chebyshev radius does not exceed this is treated as
/// measure-zero and dropped from union results.
inline constexpr double kInteriorTol = 1e-7;
/// Default half-width of the operating box used to bound "virtual" rows.
inline constexpr double kDefaultBoxHalfWidth = 1e3;

enum class Strictness {
  kRespect,   // strict rows open, non-strict rows closed
  kClosure,   // every row closed
  kInterior,  // every row open
};

/// Polytope in H-representation {x : A x (<|<=) b}. Each row carries a
/// strictness flag; geometric operations work on the closure.
class Polytope {
 public:
  /// The whole space R^dim.
  explicit Polytope(int dim = 0);
  Polytope(Mat A, Vec b);
  Polytope(Mat A, Vec b, std::vector<bool> strict);
  explicit Polytope(LinConstraintSet cons);

  static Polytope box(const Vec& lo, const Vec& hi);
  static Polytope empty(int dim);

  int dim() const { return cons_.dim(); }
  int rows() const { return cons_.rows(); }
  const LinConstraintSet& cons() const { return cons_; }
  const Mat& A() const { return cons_.A; }
  const Vec& b() const { return cons_.b; }
  const std::vector<bool>& strict() const { return strict_; }
  bool strict(int row) const { return strict_[row]; }

  void add_row(const Vec& normal, double offset, bool strict = false);
  Polytope intersect(const Polytope& other) const;
  Polytope with_strictness(bool strict) const;
  /// The polytope {-x : x in P}.
  Polytope negated() const;

  /// True iff the closure is infeasible.
  bool is_empty() const;
  /// Radius of the largest inscribed ball, capped at 1; negative when the
  /// closure is empty.
  double chebyshev_radius() const;
  bool has_interior() const { return chebyshev_radius() > kInteriorTol; }
  bool is_bounded() const;
  bool contains(const Vec& x, Strictness mode = Strictness::kClosure) const;

 private:
  LinConstraintSet cons_;
  std::vector<bool> strict_;
};

struct Membership {
  bool inside = false;
  std::optional<int> witness_part;
};

/// Finite union of polytopes of equal dimension. No parts is the empty set.
class PolyUnion {
 public:
  explicit PolyUnion(int dim = 0) : dim_(dim) {}
  PolyUnion(int dim, std::vector<Polytope> parts);
  explicit PolyUnion(Polytope part);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(parts_.size()); }
  bool empty() const { return parts_.empty(); }
  const std::vector<Polytope>& parts() const { return parts_; }
  const Polytope& operator[](int i) const { return parts_[i]; }
  auto begin() const { return parts_.begin(); }
  auto end() const { return parts_.end(); }

  /// Appends `part` unless its closure is empty.
  void add(Polytope part);
  void append(const PolyUnion& other);

 private:
  int dim_;
  std::vector<Polytope> parts_;
};

/// Removes redundant rows and normalizes each row to unit length.
/// Returns the canonical polytope and whether it is empty.
std::pair<Polytope, bool> canonicalize(const Polytope& P);

/// Vertices of the closure of a bounded nonempty polytope.
std::vector<Vec> vertices(const Polytope& P);

/// Minimal H-representation of the convex hull. Lower-dimensional hulls
/// include equality pairs of rows.
Polytope hull(const std::vector<Vec>& points);

/// {M v : v in P} for bounded P.
Polytope linear_image(const Mat& M, const Polytope& P);
/// {x : A x in S}. Throws SingularMatrix when A is (numerically) singular.
PolyUnion affine_preimage(const Mat& A, const PolyUnion& S);
Polytope minkowski_sum(const Polytope& P, const Polytope& Q);
/// Pontryagin difference {x : x + q in P for all q in Q}.
Polytope pdiff(const Polytope& P, const Polytope& Q);
/// Closure of S \ T, dropping measure-zero pieces.
PolyUnion region_diff(const PolyUnion& S, const PolyUnion& T);
/// {x : x + Q subset of S} for a union S.
PolyUnion union_pdiff(const PolyUnion& S, const Polytope& Q);
Polytope convhull_union(const PolyUnion& S);
Membership contains(const PolyUnion& S, const Vec& x,
                    Strictness mode = Strictness::kClosure);
bool set_equal(const PolyUnion& S, const PolyUnion& T);

/// Closure of P contained in closure of Q (tolerance kFeasTol).
bool is_subset(const Polytope& P, const Polytope& Q);
/// S subset of T up to measure zero.
bool is_subset(const PolyUnion& S, const PolyUnion& T);
PolyUnion intersect(const PolyUnion& S, const Polytope& P);

/// Drops measure-zero parts and parts covered by a single other part, then
/// greedily merges pairs whose union is convex.
PolyUnion simplify(const PolyUnion& S);

/// Euclidean distance from x to the closure of P (zero inside).
double distance(const Polytope& P, const Vec& x);

}  // namespace actgov
