#pragma once

#include "margin/geometry.hpp"

namespace margin {

// Linear minimization oracle output: the point of each ellipsoid that
// minimizes the current linearized objective.
struct LmoPair {
  Vec3 s1 = Vec3::Zero();  // in the chaser ellipsoid
  Vec3 s2 = Vec3::Zero();  // in the target ellipsoid
};

// Closed-form linear minimization over both ellipsoids for the squared
// distance objective at iterates (x, y):
//   s1 = chaser.center + Cov_c (y - x) / |y - x|_{Cov_c}
//   s2 = target.center + Cov_t (x - y) / |x - y|_{Cov_t}
// where Cov = shape^-1 and |d|_Cov = sqrt(d^T Cov d). Implemented with
// Cholesky solves; no covariance is formed explicitly. Throws
// CoincidentIterates when |x - y| < 1e-15.
LmoPair lmo(const Conjunction& c, const Vec3& x, const Vec3& y);

// Exact step for the quadratic objective along the pair direction:
// alpha = clip_[0,1]( (r - p)^T r / |r - p|^2 ) with r = x - y, p = s1 - s2.
// Throws DegenerateDirection when |r - p| < 1e-15; the solver treats that as
// convergence (the gap is zero there).
double line_search_alpha(const Vec3& x, const Vec3& y, const Vec3& s1, const Vec3& s2);

// Optional per-iteration diagnostics. objective[k] is |x-y|^2 after update
// k; gap[k] is the duality gap 2 r^T (r - p) evaluated before update k. The
// gap upper-bounds the objective suboptimality, so it certifies the final
// iterate.
struct FwTrace {
  std::vector<double> objective;
  std::vector<double> gap;
};

struct FwOptions {
  double tol_step = 1e-3;  // km, on max(|dx|, |dy|)
  int max_iter = 10000;
  FwTrace* trace = nullptr;
};

// Centralized margin solver. Runs the overlap pre-test first: overlapping
// conjunctions return margin 0 with both closest points set to the common
// witness point. Otherwise iterates from the ellipsoid centers until the
// step criterion or the iteration cap is hit.
MarginResult solve_fw(const Conjunction& c, const FwOptions& opts = {});

}  // namespace margin
