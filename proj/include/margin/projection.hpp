#pragma once

#include <vector>

#include "margin/geometry.hpp"

namespace margin {

// Root of psi(lambda) = sum_i w_i^2 (x_i - r_i)^2 / (1 + lambda w_i^2)^2 - eps^2
// for a point x strictly outside the axis-aligned set
// { y : sum_i w_i^2 (y_i - r_i)^2 <= eps^2 }.
struct NewtonRoot {
  double lambda = 0;
  int iterations = 0;
};

// Newton iteration from lambda = 0. psi is convex and decreasing on
// [0, inf), so the iterates increase monotonically to the unique positive
// root; convergence is declared at |psi| <= 1e-12 * eps^2 and the iteration
// is capped at 100 steps (MaxIterationsExceeded beyond that). Throws
// NotExterior when x is not strictly outside. When `iterates` is given,
// every lambda visited (including the start) is appended to it.
NewtonRoot newton_lambda(const Vec3& w, const Vec3& r, const Vec3& x, double eps,
                         std::vector<double>* iterates = nullptr);

struct AxisProjection {
  Vec3 point = Vec3::Zero();
  double lambda = 0;   // 0 when the input was already inside
  int newton_iters = 0;
};

// Euclidean projection onto the axis-aligned set above. Interior points and
// points within 1e-12 * eps^2 of the boundary are returned unchanged;
// exterior points map to g_i = (x_i + lambda w_i^2 r_i) / (1 + lambda w_i^2)
// with lambda from newton_lambda.
AxisProjection project_axis_aligned(const Vec3& w, const Vec3& r, const Vec3& x, double eps);

// Projection onto a general ellipsoid, done in its principal-axis frame.
// The frame (one symmetric eigendecomposition) is computed once per
// instance, so repeated projections onto the same ellipsoid are cheap.
class EllipsoidProjector {
 public:
  explicit EllipsoidProjector(const Ellipsoid& e);

  Vec3 operator()(const Vec3& x) const;

 private:
  Vec3 center_;
  Mat3 basis_;  // columns: principal axes
  Vec3 w_;      // sqrt of the shape eigenvalues, ascending
};

// One-shot convenience wrapper around EllipsoidProjector.
Vec3 project_ellipsoid(const Ellipsoid& e, const Vec3& x);

}  // namespace margin
