#pragma once

// Thin-plate-spline RBF interpolation with a linear tail:
//   s(q) = sum_i c_i phi(|q - x_i|) + a^T q + b,   phi(r) = r^2 log r.
// The tail is fitted first by least squares; c then interpolates the
// residuals.

#include "interpbound/dataset.hpp"

namespace interpbound::tps {

/// phi(r) = r^2 log r, extended by continuity with phi(0) = 0.
double kernel(double r);

struct Model {
  Matrix centers;
  Vector coefficients;
  Vector tail_slope;
  double tail_intercept = 0.0;
  Vector responses;
  /// |A c - rhs| / |rhs| achieved by the kernel solve.
  double solve_residual = 0.0;

  double predict(const Vector& q) const;
};

/// Throws DuplicatePoints, NearSingularSystem (relative residual > 1e-6),
/// InvalidArgument when n < d + 2.
Model fit(const Dataset& data);

inline double predict(const Model& model, const Vector& q) { return model.predict(q); }

struct Box {
  Vector lower;
  Vector upper;
};

Box bounding_box(const Matrix& points);
Box cube(Eigen::Index d, double lo, double hi);

/// Monte Carlo fill distance: max over m seeded uniform samples of the region
/// of the distance to the nearest data point. Sample i does not depend on m,
/// so growing m only adds samples.
double fill_distance(const Dataset& data, const Box& region, std::size_t m = 10000, std::uint64_t seed = 0);

struct BoundParts {
  double lipschitz = 0.0;
  double fill_distance = 0.0;
  double bound_value = 0.0;
};

/// L * h * max(1, sqrt(|log h|)).
BoundParts practical_bound(double lipschitz, double h);

}  // namespace interpbound::tps
