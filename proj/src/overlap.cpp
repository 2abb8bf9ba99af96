#include "margin/overlap.hpp"

#include <cmath>

namespace margin {

namespace {

// Blend of the two shape matrices; positive definite for lambda in [0,1].
Mat3 blend_factor(const Conjunction& c, double lambda) {
  SymMat3 s = c.chaser.shape * lambda + c.target.shape * (1.0 - lambda);
  try {
    return cholesky(s);
  } catch (const NotPositiveDefinite&) {
    throw SingularSigmaLambda("overlap: shape blend lost positive definiteness at lambda = " +
                              std::to_string(lambda));
  }
}

}  // namespace

double k_of_lambda(const Conjunction& c, double lambda) {
  Mat3 l = blend_factor(c, lambda);
  Vec3 delta = c.target.center - c.chaser.center;
  Vec3 u = c.chaser.shape * delta;
  Vec3 v = c.target.shape * delta;
  return 1.0 - lambda * (1.0 - lambda) * v.dot(cholesky_solve(l, u));
}

Vec3 overlap_point(const Conjunction& c, double lambda) {
  Mat3 l = blend_factor(c, lambda);
  Vec3 rhs = (c.chaser.shape * c.chaser.center) * lambda +
             (c.target.shape * c.target.center) * (1.0 - lambda);
  return cholesky_solve(l, rhs);
}

BrentResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                           double tol, int max_iter) {
  // Classic derivative-free scheme: parabolic interpolation through the
  // three best points, falling back to golden-section when the parabola is
  // not trustworthy.
  constexpr double golden = 0.3819660112501051;
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double d = 0, e = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    double mid = 0.5 * (a + b);
    double tol1 = tol * std::abs(x) + tol * 0.1;
    double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) {
      return {x, fx, iter};
    }
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, mid - x);
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x < mid) ? b - x : a - x;
      d = golden * e;
    }
    double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    double fu = f(u);
    if (fu <= fx) {
      (u < x ? b : a) = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  throw MaxIterationsExceeded("brent_minimize: no convergence within " +
                              std::to_string(max_iter) + " iterations");
}

OverlapReport overlap_test(const Conjunction& c) {
  constexpr double tol_k = 1e-12;  // tangency counts as overlapping
  int evaluations = 0;
  auto counted = [&](double l) {
    ++evaluations;
    return k_of_lambda(c, l);
  };
  BrentResult r = brent_minimize(counted, 0.0, 1.0, 1e-10, 200);
  OverlapReport rep;
  rep.lambda_star = r.xmin;
  rep.k_min = r.fmin;
  rep.evaluations = evaluations;
  rep.overlapping = r.fmin >= -tol_k;
  return rep;
}

}  // namespace margin
