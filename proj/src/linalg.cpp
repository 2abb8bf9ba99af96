#include "margin/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace margin {

double SymMat3::max_abs_diag() const { return std::max({xx, yy, zz}); }

Mat3 cholesky(const SymMat3& m) {
  // Pivots are compared against the largest diagonal entry, not an absolute
  // floor, so the verdict does not depend on the unit scale of the input.
  const double threshold = 1e-13 * m.max_abs_diag();
  Mat3 a = m.matrix();
  Mat3 l = Mat3::Zero();
  for (int j = 0; j < 3; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > threshold) || !std::isfinite(d)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) +
                                " at index " + std::to_string(j) +
                                " below tolerance");
    }
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < 3; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Vec3 cholesky_solve(const Mat3& l, const Vec3& rhs) {
  Vec3 y = l.triangularView<Eigen::Lower>().solve(rhs);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

SymEigen sym_eigen(const SymMat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> solver(m.matrix());
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SymMat3 sym_pow(const SymMat3& m, double p) {
  cholesky(m);  // positive definiteness gate, same pivot rule everywhere
  SymEigen e = sym_eigen(m);
  Vec3 powered;
  for (int i = 0; i < 3; ++i) powered[i] = std::pow(e.values[i], p);
  Mat3 result = e.vectors * powered.asDiagonal() * e.vectors.transpose();
  return SymMat3::from_upper(result);
}

double eigen6_min_real(const Mat6& m) {
  Eigen::EigenSolver<Mat6> solver;
  solver.setMaxIterations(600);  // 100 QR sweeps per eigenvalue
  solver.compute(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NoRealEigenvalue("eigen6_min_real: QR iteration did not converge");
  }
  bool found = false;
  double best = 0;
  for (int i = 0; i < 6; ++i) {
    const std::complex<double> z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z.real()))) {
      if (!found || z.real() < best) best = z.real();
      found = true;
    }
  }
  if (!found) {
    throw NoRealEigenvalue("eigen6_min_real: all eigenvalues have significant imaginary parts");
  }
  return best;
}

}  // namespace margin
