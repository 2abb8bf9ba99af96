#pragma once

#include <functional>

#include "margin/geometry.hpp"

namespace margin {

// Verdict of the ellipsoid intersection pre-test. The test minimizes a scalar
// convex function K over [0,1]; the ellipsoids are disjoint if and only if
// min K < 0 (strictly). Tangency (min K == 0 within tol_k) is classified as
// overlapping, which is the conservative call for screening.
struct OverlapReport {
  bool overlapping = false;
  double lambda_star = 0;  // argmin of K over [0,1]
  double k_min = 0;        // K(lambda_star)
  int evaluations = 0;     // K evaluations spent by the minimizer
};

// K(lambda) = 1 - lambda (1-lambda) (c-b)^T C S^-1 B (c-b) with
// S = lambda B + (1-lambda) C, where B, C are the two shape matrices and
// b, c the centers. Convex on [0,1] with K(0) = K(1) = 1. Throws
// SingularSigmaLambda if the blend S is not positive definite (degenerate
// input).
double k_of_lambda(const Conjunction& c, double lambda);

// Center of the lambda-blend ellipsoid, m = S^-1 (lambda B b + (1-lambda) C c).
// At the minimizing lambda of a non-negative K this point lies in both
// ellipsoids, which makes it the natural witness for overlapping cases.
Vec3 overlap_point(const Conjunction& c, double lambda);

struct BrentResult {
  double xmin = 0;
  double fmin = 0;
  int iterations = 0;
};

// Derivative-free scalar minimization on [lo, hi] (golden section with
// parabolic interpolation). `tol` is an absolute tolerance on the abscissa.
// Throws MaxIterationsExceeded when the iteration cap is hit.
BrentResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                           double tol, int max_iter);

// Runs the pre-test: Brent on K over [0,1] with tolerance 1e-10 and at most
// 200 iterations; the verdict compares min K against tol_k = 1e-12.
OverlapReport overlap_test(const Conjunction& c);

}  // namespace margin
