#include "margin/geometry.hpp"

#include <cmath>
#include <utility>

namespace margin {

Ellipsoid::Ellipsoid(const Vec3& center_, const SymMat3& shape_)
    : center(center_), shape(shape_) {
  cholesky(shape);  // throws NotPositiveDefinite for invalid shapes
}

Ellipsoid Ellipsoid::from_covariance(const Vec3& center, const SymMat3& covariance) {
  return Ellipsoid(center, sym_pow(covariance, -1.0));
}

Ellipsoid Ellipsoid::sphere(const Vec3& center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) {
    throw Error("sphere: radius must be positive and finite");
  }
  return Ellipsoid(center, SymMat3::identity() * (1.0 / (radius * radius)));
}

Conjunction::Conjunction(std::string id_, Ellipsoid chaser_, Ellipsoid target_,
                         double chaser_radius_, double target_radius_,
                         std::optional<double> risk_)
    : id(std::move(id_)),
      chaser(std::move(chaser_)),
      target(std::move(target_)),
      chaser_radius(chaser_radius_),
      target_radius(target_radius_),
      risk(risk_) {
  if (!(chaser_radius >= 0) || !std::isfinite(chaser_radius) ||
      !(target_radius >= 0) || !std::isfinite(target_radius)) {
    throw Error("conjunction " + id + ": radii must be finite and nonnegative");
  }
  if (risk && !(*risk <= 0)) {
    throw Error("conjunction " + id + ": risk is a log10 probability, must be <= 0");
  }
}

const char* method_name(Method m) {
  switch (m) {
    case Method::frank_wolfe: return "fw";
    case Method::fista: return "fista";
    case Method::rimon_boyd: return "rimon-boyd";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

Ellipsoid scale_sigma(const Ellipsoid& e, double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw InvalidSigma("scale_sigma: sigma must be positive and finite, got " +
                       std::to_string(sigma));
  }
  return Ellipsoid(e.center, e.shape * (1.0 / (sigma * sigma)));
}

bool contains(const Ellipsoid& e, const Vec3& p, double tol) {
  return e.shape.quad(p - e.center) <= 1.0 + tol;
}

double miss_distance(const Conjunction& c) {
  return (c.chaser.center - c.target.center).norm();
}

}  // namespace margin
