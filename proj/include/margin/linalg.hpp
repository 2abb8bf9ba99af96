#pragma once

#include <Eigen/Dense>

#include "margin/errors.hpp"

namespace margin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Symmetric 3x3 matrix stored as its six independent entries, so symmetry
// holds exactly by construction rather than up to roundoff.
struct SymMat3 {
  double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;

  static SymMat3 identity() { return {1, 0, 0, 1, 0, 1}; }
  static SymMat3 diagonal(double a, double b, double c) { return {a, 0, 0, b, 0, c}; }
  // Builds from the upper triangle of m; the lower triangle is ignored.
  static SymMat3 from_upper(const Mat3& m) {
    return {m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2)};
  }

  Mat3 matrix() const {
    Mat3 m;
    m << xx, xy, xz, xy, yy, yz, xz, yz, zz;
    return m;
  }

  Vec3 operator*(const Vec3& v) const {
    return {xx * v.x() + xy * v.y() + xz * v.z(),
            xy * v.x() + yy * v.y() + yz * v.z(),
            xz * v.x() + yz * v.y() + zz * v.z()};
  }

  SymMat3 operator+(const SymMat3& o) const {
    return {xx + o.xx, xy + o.xy, xz + o.xz, yy + o.yy, yz + o.yz, zz + o.zz};
  }

  SymMat3 operator*(double s) const { return {xx * s, xy * s, xz * s, yy * s, yz * s, zz * s}; }

  // v^T M v
  double quad(const Vec3& v) const { return v.dot((*this) * v); }

  double max_abs_diag() const;
};

inline SymMat3 operator*(double s, const SymMat3& m) { return m * s; }

// Eigendecomposition of a symmetric matrix: values ascending, vectors form an
// orthonormal basis stored column-wise (column i pairs with values[i]).
struct SymEigen {
  Vec3 values;
  Mat3 vectors;
};

// Lower Cholesky factor L with m = L L^T. Positive definiteness is decided by
// the pivots: every pivot must exceed 1e-13 times the largest diagonal entry
// of m, otherwise NotPositiveDefinite is thrown. This rule keeps the verdict
// scale-invariant across covariances spanning many orders of magnitude.
Mat3 cholesky(const SymMat3& m);

// Solves (L L^T) x = rhs given the lower factor from cholesky().
Vec3 cholesky_solve(const Mat3& L, const Vec3& rhs);

SymEigen sym_eigen(const SymMat3& m);

// m^p through the spectral decomposition. Intended for p in {-1, 0.5, -0.5};
// requires m positive definite (validated with the same pivot rule as
// cholesky). Result is symmetric positive definite.
SymMat3 sym_pow(const SymMat3& m, double p);

// Smallest real eigenvalue of a general (possibly non-normal, possibly
// defective) 6x6 matrix. An eigenvalue counts as real when its imaginary
// part is at most 1e-8 * (1 + |real part|). The QR iteration is capped at
// 100 sweeps per eigenvalue; hitting the cap or finding no real eigenvalue
// throws NoRealEigenvalue.
double eigen6_min_real(const Mat6& m);

}  // namespace margin
