#include "margin/frank_wolfe.hpp"

#include <cmath>

#include "margin/errors.hpp"
#include "margin/linalg.hpp"
#include "margin/overlap.hpp"

namespace margin {

namespace {

// Support point of the ellipsoid in direction d: the feasible point that
// maximizes d^T s. Solving shape * z = d keeps the covariance implicit.
Vec3 support_toward(const Ellipsoid& e, const Vec3& d) {
  Vec3 z = cholesky_solve(cholesky(e.shape), d);
  return e.center + z / std::sqrt(d.dot(z));
}

}  // namespace

LmoPair lmo(const Conjunction& c, const Vec3& x, const Vec3& y) {
  Vec3 d = y - x;
  if (d.norm() < 1e-15) {
    throw CoincidentIterates("iterates coincide; the linearized objective has no direction");
  }
  LmoPair out;
  out.s1 = support_toward(c.chaser, d);
  out.s2 = support_toward(c.target, -d);
  return out;
}

double line_search_alpha(const Vec3& x, const Vec3& y, const Vec3& s1, const Vec3& s2) {
  Vec3 r = x - y;
  Vec3 p = s1 - s2;
  Vec3 q = r - p;
  double denom = q.squaredNorm();
  if (denom < 1e-30) {
    throw DegenerateDirection("pair direction coincides with the current iterate pair");
  }
  double alpha = q.dot(r) / denom;
  return std::min(1.0, std::max(0.0, alpha));
}

MarginResult solve_fw(const Conjunction& c, const FwOptions& opts) {
  MarginResult res;
  res.method = Method::frank_wolfe;

  OverlapReport report = overlap_test(c);
  if (report.overlapping) {
    Vec3 w = overlap_point(c, report.lambda_star);
    res.margin = 0.0;
    res.x_star = w;
    res.y_star = w;
    res.iterations = 0;
    res.converged = true;
    res.overlap = true;
    return res;
  }

  Vec3 x = c.chaser.center;
  Vec3 y = c.target.center;
  int k = 0;
  bool converged = false;
  while (k < opts.max_iter) {
    LmoPair s = lmo(c, x, y);
    Vec3 r = x - y;
    Vec3 p = s.s1 - s.s2;
    Vec3 q = r - p;
    if (opts.trace) opts.trace->gap.push_back(2.0 * r.dot(q));
    if (q.squaredNorm() < 1e-30) {
      // The pair direction vanishes only at a stationary pair, so the gap is
      // zero up to roundoff and the iterates are already optimal.
      ++k;
      if (opts.trace) opts.trace->objective.push_back(r.squaredNorm());
      converged = true;
      break;
    }
    double alpha = q.dot(r) / q.squaredNorm();
    alpha = std::min(1.0, std::max(0.0, alpha));
    Vec3 x_next = x + alpha * (s.s1 - x);
    Vec3 y_next = y + alpha * (s.s2 - y);
    double step = std::max((x_next - x).norm(), (y_next - y).norm());
    x = x_next;
    y = y_next;
    ++k;
    if (opts.trace) opts.trace->objective.push_back((x - y).squaredNorm());
    if (step <= opts.tol_step) {
      converged = true;
      break;
    }
  }

  res.margin = (x - y).norm();
  res.x_star = x;
  res.y_star = y;
  res.iterations = k;
  res.converged = converged;
  res.overlap = false;
  return res;
}

}  // namespace margin
