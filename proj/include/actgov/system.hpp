#pragma once

#include "actgov/optimize.hpp"

namespace actgov {

/// x(k+1) = A x(k) + B u(k), sampled every `dt` seconds.
struct LinearSystem {
  Mat A;
  Mat B;
  double dt = 1.0;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  Vec step(const Vec& x, const Vec& u) const { return A * x + B * u; }
  /// Throws DimensionMismatch / InvalidInput on inconsistent data.
  void validate() const;
};

}  // namespace actgov
