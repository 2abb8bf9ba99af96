#pragma once

#include "margin/geometry.hpp"

namespace margin {

struct OracleOptions {
  double tol = 1e-9;        // km, on the iterate step
  long max_iter = 1000000;  // alternating projection rounds
};

// Reference solver: alternating projections between the two ellipsoids,
// started from the chaser center (project onto the target, then back onto
// the chaser, repeat). Converges to the closest pair for disjoint convex
// sets; the overlap pre-test short-circuits overlapping cases to margin 0.
// At convergence a fixed-point certificate is enforced: re-projecting each
// final point onto the opposite set must move it by at most 10 * tol,
// otherwise the result is reported as not converged. Convergence degrades
// near tangency, hence the much tighter default tolerance and generous
// iteration budget compared to the production solvers.
MarginResult solve_oracle(const Conjunction& c, const OracleOptions& opts = {});

// Signed error of an estimate against the reference value (km); positive
// means overestimation. Kept signed because the benchmark's failure mode of
// interest is overestimating the margin past the miss distance.
double relative_error(double estimate, double truth);

}  // namespace margin
