#pragma once

#include <optional>
#include <string>

#include "margin/linalg.hpp"

namespace margin {

// Positional uncertainty region { p : (p - center)^T shape (p - center) <= 1 }.
// `shape` is the inverse covariance in km^-2; centers are in km. Covariances
// from input files are inverted exactly once, at ingestion, by
// from_covariance().
struct Ellipsoid {
  Vec3 center;
  SymMat3 shape;

  // Validates that shape is symmetric positive definite.
  Ellipsoid(const Vec3& center_, const SymMat3& shape_);

  // Inverts the covariance (km^2) to build the shape matrix. Throws
  // NotPositiveDefinite for singular or indefinite covariances.
  static Ellipsoid from_covariance(const Vec3& center, const SymMat3& covariance);

  // Ball of the given radius (km); handy for analytic test cases.
  static Ellipsoid sphere(const Vec3& center, double radius);
};

// One screening case: chaser and target uncertainty ellipsoids plus their
// hard-body radii (km) and an optional log10 collision probability used only
// for reporting.
struct Conjunction {
  std::string id;
  Ellipsoid chaser;
  Ellipsoid target;
  double chaser_radius = 0;
  double target_radius = 0;
  std::optional<double> risk;

  Conjunction(std::string id_, Ellipsoid chaser_, Ellipsoid target_,
              double chaser_radius_ = 0, double target_radius_ = 0,
              std::optional<double> risk_ = std::nullopt);
};

enum class Method { frank_wolfe, fista, rimon_boyd, oracle };

// Stable lowercase names used in reports and CLI flags.
const char* method_name(Method m);

// Output of any margin solver. When overlap is true the margin is exactly 0
// and x_star == y_star is a point common to both ellipsoids. Otherwise
// margin == |x_star - y_star| and the two points are feasible in their
// respective ellipsoids (the closed-form benchmark is exempt from the
// feasibility guarantee; see rimon_boyd.hpp).
struct MarginResult {
  double margin = 0;
  Vec3 x_star = Vec3::Zero();
  Vec3 y_star = Vec3::Zero();
  int iterations = 0;
  bool converged = false;
  bool overlap = false;
  Method method = Method::frank_wolfe;
};

// Grows the ellipsoid to its k-sigma level: shape / sigma^2, semi-axes times
// sigma. Throws InvalidSigma unless sigma is finite and positive.
Ellipsoid scale_sigma(const Ellipsoid& e, double sigma);

// Membership test with a relative slack on the quadratic form.
bool contains(const Ellipsoid& e, const Vec3& p, double tol = 1e-9);

// Center-to-center distance (km). The margin never exceeds it.
double miss_distance(const Conjunction& c);

}  // namespace margin
