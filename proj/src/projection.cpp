#include "margin/projection.hpp"

#include <cmath>

namespace margin {

namespace {

// sum_i w_i^2 (x_i - r_i)^2, the set's quadratic value at x.
double quad_value(const Vec3& w, const Vec3& r, const Vec3& x) {
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    double d = x[i] - r[i];
    s += w[i] * w[i] * d * d;
  }
  return s;
}

}  // namespace

NewtonRoot newton_lambda(const Vec3& w, const Vec3& r, const Vec3& x, double eps,
                         std::vector<double>* iterates) {
  const double eps2 = eps * eps;
  if (!(quad_value(w, r, x) > eps2)) {
    throw NotExterior("newton_lambda: point is not strictly outside the set");
  }
  const double tol = 1e-12 * eps2;
  double lambda = 0.0;
  if (iterates) iterates->push_back(lambda);
  for (int it = 0; it <= 100; ++it) {
    double value = -eps2;
    double slope = 0;
    for (int i = 0; i < 3; ++i) {
      double wi2 = w[i] * w[i];
      double d = x[i] - r[i];
      double den = 1.0 + lambda * wi2;
      value += wi2 * d * d / (den * den);
      slope -= 2.0 * wi2 * wi2 * d * d / (den * den * den);
    }
    if (std::abs(value) <= tol) {
      return {lambda, it};
    }
    // psi is convex and decreasing on [0, inf), so from the left of the root
    // every Newton step moves right and never overshoots.
    lambda -= value / slope;
    if (iterates) iterates->push_back(lambda);
  }
  throw MaxIterationsExceeded("newton_lambda: no convergence in 100 iterations");
}

AxisProjection project_axis_aligned(const Vec3& w, const Vec3& r, const Vec3& x, double eps) {
  const double eps2 = eps * eps;
  double value = quad_value(w, r, x);
  if (value <= eps2 * (1.0 + 1e-12)) {
    return {x, 0.0, 0};  // interior, or within the boundary tolerance
  }
  NewtonRoot root = newton_lambda(w, r, x, eps);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    double wi2 = w[i] * w[i];
    g[i] = (x[i] + root.lambda * wi2 * r[i]) / (1.0 + root.lambda * wi2);
  }
  return {g, root.lambda, root.iterations};
}

EllipsoidProjector::EllipsoidProjector(const Ellipsoid& e) : center_(e.center) {
  SymEigen eig = sym_eigen(e.shape);
  basis_ = eig.vectors;
  for (int i = 0; i < 3; ++i) w_[i] = std::sqrt(eig.values[i]);
}

Vec3 EllipsoidProjector::operator()(const Vec3& x) const {
  Vec3 local = basis_.transpose() * (x - center_);
  AxisProjection p = project_axis_aligned(w_, Vec3::Zero(), local, 1.0);
  if (p.lambda == 0.0) return x;  // interior points come back bit-identical
  return center_ + basis_ * p.point;
}

Vec3 project_ellipsoid(const Ellipsoid& e, const Vec3& x) {
  return EllipsoidProjector(e)(x);
}

}  // namespace margin
