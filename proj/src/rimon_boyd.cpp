#include "margin/rimon_boyd.hpp"

#include "margin/errors.hpp"
#include "margin/linalg.hpp"

namespace margin {

namespace {

// [[A, -I], [-v v^T, A]]: the stage pencil whose smallest real eigenvalue
// scales the touching level surface.
Mat6 stage_pencil(const SymMat3& a, const Vec3& v) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = a.matrix();
  m.topRightCorner<3, 3>() = -Mat3::Identity();
  m.bottomLeftCorner<3, 3>() = -(v * v.transpose());
  m.bottomRightCorner<3, 3>() = a.matrix();
  return m;
}

struct Stage1 {
  SymMat3 B_half;
  SymMat3 B_neg_half;
  SymMat3 C_bar;
  SymMat3 C_tilde;
  Vec3 c_tilde;
  Mat6 M1;
};

Stage1 build_stage1(const Conjunction& c) {
  Stage1 s;
  s.B_half = sym_pow(c.chaser.shape, 0.5);
  s.B_neg_half = sym_pow(c.chaser.shape, -0.5);
  Mat3 c_bar = s.B_neg_half.matrix() * c.target.shape.matrix() * s.B_neg_half.matrix();
  s.C_bar = SymMat3::from_upper(c_bar);
  s.C_tilde = sym_pow(s.C_bar, -1.0);
  SymMat3 c_bar_neg_half = sym_pow(s.C_bar, -0.5);
  s.c_tilde = c_bar_neg_half * (s.B_half * (c.target.center - c.chaser.center));
  s.M1 = stage_pencil(s.C_tilde, s.c_tilde);
  return s;
}

}  // namespace

Mat6 rb_m1(const Conjunction& c) { return build_stage1(c).M1; }

double rb_nonnormality_witness(const Mat6& m) {
  return (m * m.transpose() - m.transpose() * m).norm();
}

MarginResult rb_margin(const Conjunction& c, RbVariant variant, RbIntermediates* intermediates) {
  Stage1 s1 = build_stage1(c);
  double lambda1 = eigen6_min_real(s1.M1);

  // Stage 1: back-map the touching level to the target boundary point. The
  // bracket can be arbitrarily close to singular for skewed shapes; the raw
  // solve is intentional (this estimator's instability is part of what it
  // benchmarks).
  Vec3 offset = c.target.center - c.chaser.center;
  Vec3 rhs1 = variant == RbVariant::corrected ? Vec3(s1.B_half * offset) : s1.c_tilde;
  Mat3 bracket1 = lambda1 * Mat3::Identity() - s1.C_tilde.matrix();
  Vec3 y_star =
      c.chaser.center + lambda1 * (s1.B_neg_half.matrix() * bracket1.partialPivLu().solve(rhs1));

  // Stage 2: closest chaser point to y*.
  SymMat3 B_tilde = sym_pow(c.chaser.shape, -1.0);
  Vec3 back = c.chaser.center - y_star;
  Vec3 b_tilde =
      variant == RbVariant::corrected ? Vec3(s1.B_neg_half * back) : Vec3(s1.B_half * c.chaser.center);
  Mat6 m2 = stage_pencil(B_tilde, b_tilde);
  double mu1 = eigen6_min_real(m2);

  Vec3 rhs2 = variant == RbVariant::corrected ? back : c.chaser.center;
  Mat3 bracket2 = mu1 * Mat3::Identity() - B_tilde.matrix();
  Vec3 x_star = y_star + mu1 * bracket2.partialPivLu().solve(rhs2);

  if (intermediates) {
    intermediates->C_bar = s1.C_bar;
    intermediates->C_tilde = s1.C_tilde;
    intermediates->c_tilde = s1.c_tilde;
    intermediates->M1 = s1.M1;
    intermediates->M2 = m2;
    intermediates->lambda1 = lambda1;
    intermediates->mu1 = mu1;
    intermediates->y_star = y_star;
    intermediates->x_star = x_star;
  }

  MarginResult res;
  res.method = Method::rimon_boyd;
  res.x_star = x_star;
  res.y_star = y_star;
  res.margin = (x_star - y_star).norm();  // reported raw, even when wrong
  res.iterations = 0;
  res.converged = true;
  res.overlap = false;
  return res;
}

}  // namespace margin
