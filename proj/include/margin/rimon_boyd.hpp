#pragma once

#include "margin/geometry.hpp"

namespace margin {

// Closed-form two-stage benchmark: stage 1 finds the point y* of the target
// ellipsoid first touched by the chaser's inflating level surfaces (a 6x6
// eigenproblem), stage 2 finds the point x* of the chaser ellipsoid closest
// to y* (a second 6x6 eigenproblem). Both matrices are non-normal, which is
// the known accuracy hazard of the construction on ill-conditioned shapes:
// results are reported as-is, never clamped or corrected, so individual
// errors can be large and the margin can even exceed the miss distance.
// This method is a benchmark, not ground truth.

// The original statement of the construction leaves two symbols undefined
// and references the chaser center where its own derivation needs the
// vector from y* to that center; taken literally it returns margin 0 (or
// NaN) whenever the chaser sits at the origin. Both readings are kept:
//   corrected  - stage-1/stage-2 vectors taken from the derivation
//                (c_bar = B^{1/2}(c-b), b_tilde = B^{-1/2}(b-y*),
//                 x* = y* + mu1 [mu1 I - B~]^{-1} (b - y*));
//   as_printed - the literal text (c_bar read as c_tilde,
//                b_tilde = B~^{-1/2} b, x* = y* + mu1 [mu1 I - B~]^{-1} b).
// `corrected` reproduces analytic sphere margins and is the default;
// `as_printed` is retained for reference and pinned by tests.
enum class RbVariant { corrected, as_printed };

// Intermediate quantities of the construction, exposed for diagnostics and
// tests. B, C are the chaser/target shape matrices; b, c their centers.
struct RbIntermediates {
  SymMat3 C_bar;   // B^{-1/2} C B^{-1/2}
  SymMat3 C_tilde; // C_bar^{-1}
  Vec3 c_tilde;    // C_bar^{-1/2} B^{1/2} (c - b)
  Mat6 M1;         // [[C~, -I], [-c~ c~^T, C~]]
  Mat6 M2;         // [[B~, -I], [-b~ b~^T, B~]]
  double lambda1 = 0;  // min real eigenvalue of M1
  double mu1 = 0;      // min real eigenvalue of M2
  Vec3 y_star;
  Vec3 x_star;
};

// Margin estimate |x* - y*|. Propagates NotPositiveDefinite /
// NoRealEigenvalue from the underlying factorizations and eigensolves.
// `converged` is always true (closed form), `iterations` is 0.
MarginResult rb_margin(const Conjunction& c, RbVariant variant = RbVariant::corrected,
                       RbIntermediates* intermediates = nullptr);

// Frobenius norm of M M^T - M^T M: zero exactly for normal matrices,
// strictly positive for the stage matrices above whenever the offset vector
// is nonzero (a rank-1 block squared can never match the identity).
double rb_nonnormality_witness(const Mat6& m);

// Stage-1 matrix M1 for a conjunction, for witness diagnostics.
Mat6 rb_m1(const Conjunction& c);

}  // namespace margin
