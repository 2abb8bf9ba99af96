#include "margin/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "margin/overlap.hpp"
#include "margin/projection.hpp"

namespace margin {

MarginResult solve_oracle(const Conjunction& c, const OracleOptions& opts) {
  MarginResult result;
  result.method = Method::oracle;

  OverlapReport rep = overlap_test(c);
  if (rep.overlapping) {
    Vec3 witness = overlap_point(c, rep.lambda_star);
    result.margin = 0.0;
    result.x_star = witness;
    result.y_star = witness;
    result.converged = true;
    result.overlap = true;
    return result;
  }

  EllipsoidProjector onto_chaser(c.chaser);
  EllipsoidProjector onto_target(c.target);

  Vec3 x = c.chaser.center;
  Vec3 y = onto_target(x);
  bool converged = false;
  int iterations = 0;
  for (long k = 1; k <= opts.max_iter; ++k) {
    Vec3 x_next = onto_chaser(y);
    Vec3 y_next = onto_target(x_next);
    double step = std::max((x_next - x).norm(), (y_next - y).norm());
    x = x_next;
    y = y_next;
    iterations = static_cast<int>(std::min<long>(k, INT32_MAX));
    if (step <= opts.tol) {
      converged = true;
      break;
    }
  }
  if (converged) {
    // Fixed-point certificate: at the true closest pair each point is the
    // projection of the other. A violation downgrades the result.
    converged = (onto_target(x) - y).norm() <= 10.0 * opts.tol &&
                (onto_chaser(y) - x).norm() <= 10.0 * opts.tol;
  }

  result.margin = (x - y).norm();
  result.x_star = x;
  result.y_star = y;
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

double relative_error(double estimate, double truth) { return estimate - truth; }

}  // namespace margin
