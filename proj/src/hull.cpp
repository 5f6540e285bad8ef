// Vertex enumeration and convex hull (V -> H) conversion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "actgov/error.hpp"
#include "actgov/polytope.hpp"

namespace actgov {

namespace {

double scale_of(const std::vector<Vec>& pts) {
  double s = 1.0;
  for (const Vec& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

void push_unique(std::vector<Vec>& pts, Vec v, double tol) {
  for (const Vec& p : pts) {
    if ((p - v).cwiseAbs().maxCoeff() <= tol) return;
  }
  pts.push_back(std::move(v));
}

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

// Bitset over constraint indices, used for the combinatorial adjacency test.
class IndexSet {
 public:
  explicit IndexSet(int n = 0) : words_((n + 63) / 64, 0) {}
  void set(int i) { words_[i / 64] |= (uint64_t{1} << (i % 64)); }
  IndexSet operator&(const IndexSet& o) const {
    IndexSet r = *this;
    for (size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
    return r;
  }
  bool subset_of(const IndexSet& o) const {
    for (size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & ~o.words_[w]) return false;
    }
    return true;
  }
  int count() const {
    int c = 0;
    for (uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
  }

 private:
  std::vector<uint64_t> words_;
};

// Facets of the hull of planar points by Andrew's monotone chain; exact up
// to the orientation tolerance, so clustered points cannot lose facets.
std::vector<std::pair<Vec, double>> planar_facets(const std::vector<Vec>& pts, double tol) {
  std::vector<Vec> p = pts;
  std::sort(p.begin(), p.end(), [](const Vec& a, const Vec& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<Vec> chain(2 * p.size());
  size_t k = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(chain[k - 2], chain[k - 1], p[i]) <= tol * (chain[k - 1] - chain[k - 2]).norm()) --k;
    chain[k++] = p[i];
  }
  for (size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(chain[k - 2], chain[k - 1], p[i]) <= tol * (chain[k - 1] - chain[k - 2]).norm()) --k;
    chain[k++] = p[i];
  }
  chain.resize(k - 1);  // counter-clockwise, last point repeats the first
  std::vector<std::pair<Vec, double>> facets;
  for (size_t i = 0; i < chain.size(); ++i) {
    const Vec& a = chain[i];
    const Vec& b = chain[(i + 1) % chain.size()];
    Vec normal(2);
    normal << b(1) - a(1), a(0) - b(0);
    const double len = normal.norm();
    if (len <= tol) continue;
    normal /= len;
    facets.emplace_back(normal, normal.dot(a));
  }
  return facets;
}

struct Ray {
  Vec y;
  IndexSet tight;
};

// Facets of the hull of full-dimensional points in R^n (n >= 2) by the
// double description method on the cone {(a, beta) : beta - a.p_i >= 0}.
// Each extreme ray (a, beta) is a facet a.x <= beta.
std::vector<std::pair<Vec, double>> full_dim_facets(const std::vector<Vec>& pts,
                                                    double tol) {
  const int n = static_cast<int>(pts[0].size());
  const int d = n + 1;
  const int count = static_cast<int>(pts.size());
  auto constraint = [&](int i) {
    Vec row(d);
    row.head(n) = -pts[i];
    row(n) = 1.0;
    return row;
  };

  // Pick d affinely independent points for the initial simplicial cone.
  std::vector<int> initial;
  Mat basis(0, d);
  for (int i = 0; i < count && static_cast<int>(initial.size()) < d; ++i) {
    Mat trial(basis.rows() + 1, d);
    trial << basis, constraint(i).transpose();
    Eigen::FullPivLU<Mat> lu(trial);
    lu.setThreshold(1e-10);
    if (lu.rank() == trial.rows()) {
      basis = trial;
      initial.push_back(i);
    }
  }
  if (static_cast<int>(initial.size()) < d) {
    fail(ErrorKind::kNumericalFailure, "hull points are not full-dimensional");
  }

  std::vector<Ray> rays;
  const Mat inv = basis.inverse();
  for (int k = 0; k < d; ++k) {
    Ray r{inv.col(k).normalized(), IndexSet(count)};
    for (int l = 0; l < d; ++l) {
      if (l != k) r.tight.set(initial[l]);
    }
    rays.push_back(std::move(r));
  }

  std::vector<char> used(count, 0);
  for (int i : initial) used[i] = 1;
  for (int i = 0; i < count; ++i) {
    if (used[i]) continue;
    const Vec row = constraint(i);
    std::vector<double> val(rays.size());
    std::vector<int> pos, neg;
    for (size_t r = 0; r < rays.size(); ++r) {
      val[r] = row.dot(rays[r].y);
      if (val[r] > tol) {
        pos.push_back(static_cast<int>(r));
      } else if (val[r] < -tol) {
        neg.push_back(static_cast<int>(r));
      } else {
        rays[r].tight.set(i);
      }
    }
    if (neg.empty()) continue;

    std::vector<Ray> next;
    for (size_t r = 0; r < rays.size(); ++r) {
      if (val[r] >= -tol) next.push_back(rays[r]);
    }
    for (int p : pos) {
      for (int q : neg) {
        IndexSet common = rays[p].tight & rays[q].tight;
        if (common.count() < d - 2) continue;
        bool adjacent = true;
        for (size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (static_cast<int>(r) == p || static_cast<int>(r) == q) continue;
          if (common.subset_of(rays[r].tight)) adjacent = false;
        }
        if (!adjacent) continue;
        Vec y = val[p] * rays[q].y - val[q] * rays[p].y;
        common.set(i);
        next.push_back({y.normalized(), std::move(common)});
      }
    }
    rays = std::move(next);
  }

  std::vector<std::pair<Vec, double>> facets;
  for (const Ray& r : rays) {
    const Vec a = r.y.head(n);
    const double norm = a.norm();
    if (norm < 1e-12) continue;
    Vec an = a / norm;
    double beta = r.y(n) / norm;
    bool dup = false;
    for (auto& [fa, fb] : facets) {
      if ((fa - an).cwiseAbs().maxCoeff() < 1e-9) {
        fb = std::max(fb, beta);
        dup = true;
        break;
      }
    }
    if (!dup) facets.emplace_back(std::move(an), beta);
  }
  return facets;
}

}  // namespace

std::vector<Vec> vertices(const Polytope& P) {
  auto [C, empty] = canonicalize(P);
  if (empty) fail(ErrorKind::kEmptyPolytope, "vertices of an empty polytope");
  if (!C.is_bounded()) fail(ErrorKind::kUnboundedPolytope, "vertices of an unbounded polytope");
  const int n = C.dim();
  const int m = C.rows();
  std::vector<Vec> out;
  if (m < n) return out;
  const double vtol = 1e-8 * std::max(1.0, C.b().cwiseAbs().maxCoeff());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Mat As(n, n);
  Vec bs(n);
  do {
    for (int i = 0; i < n; ++i) {
      As.row(i) = C.A().row(idx[i]);
      bs(i) = C.b()(idx[i]);
    }
    Eigen::FullPivLU<Mat> lu(As);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) continue;
    Vec v = lu.solve(bs);
    if ((C.A() * v - C.b()).maxCoeff() > vtol) continue;
    push_unique(out, std::move(v), vtol);
  } while (next_combination(idx, m));
  std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  });
  return out;
}

Polytope hull(const std::vector<Vec>& points) {
  if (points.empty()) fail(ErrorKind::kInvalidInput, "hull of no points");
  const int n = static_cast<int>(points[0].size());
  for (const Vec& p : points) {
    if (p.size() != n) fail(ErrorKind::kDimensionMismatch, "hull points differ in dimension");
  }
  const double scale = scale_of(points);
  std::vector<Vec> pts;
  for (const Vec& p : points) push_unique(pts, p, 1e-10 * scale);

  Vec center = Vec::Zero(n);
  for (const Vec& p : pts) center += p;
  center /= static_cast<double>(pts.size());
  Mat centered(n, pts.size());
  for (size_t i = 0; i < pts.size(); ++i) centered.col(i) = pts[i] - center;

  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullU);
  const Vec& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * scale) ++rank;
  }
  const Mat U = svd.matrixU();
  const Mat span = U.leftCols(rank);

  Polytope out(n);
  // Equality pairs pin the orthogonal complement of the affine hull.
  for (int k = rank; k < n; ++k) {
    const Vec w = U.col(k);
    const double off = w.dot(center);
    out.add_row(w, off);
    out.add_row(-w, -off);
  }
  if (rank == 0) return out;

  std::vector<Vec> local;
  local.reserve(pts.size());
  for (const Vec& p : pts) local.push_back(span.transpose() * (p - center));

  if (rank == 1) {
    double lo = local[0](0), hi = local[0](0);
    for (const Vec& y : local) {
      lo = std::min(lo, y(0));
      hi = std::max(hi, y(0));
    }
    const Vec dir = span.col(0);
    out.add_row(dir, hi + dir.dot(center));
    out.add_row(-dir, -lo - dir.dot(center));
    return out;
  }

  const double tol = 1e-9 * std::max(1.0, scale_of(local));
  // The planar chain only drops points within rounding of an edge.
  const auto facets =
      rank == 2 ? planar_facets(local, 1e-4 * tol) : full_dim_facets(local, tol);
  if (static_cast<int>(facets.size()) < rank + 1) {
    fail(ErrorKind::kNumericalFailure, "convex hull lost facets");
  }
  const double slack = 1e-7 * std::max(1.0, scale_of(local));
  for (const Vec& y : local) {
    for (const auto& [alpha, beta] : facets) {
      if (alpha.dot(y) > beta + slack) fail(ErrorKind::kNumericalFailure, "convex hull misses a point");
    }
  }
  for (const auto& [alpha, beta] : facets) {
    const Vec a = span * alpha;
    out.add_row(a, beta + a.dot(center));
  }
  return out;
}

}  // namespace actgov
