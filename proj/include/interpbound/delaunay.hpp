#pragma once

// Piecewise-linear interpolation over the Delaunay simplex containing the
// query, with a computable error estimate built from local second divided
// differences and the simplex shape:
//
//   bound = (g/2) h^2 + (sqrt(d) g / 2) (k / s) h^2 + L * residual
//
// g: largest three-point divided difference over the simplex vertices,
// s: mean singular value of the edge matrix, k: longest edge from the base
// vertex, h: simplex diameter, residual: distance to the hull when
// extrapolating.

#include <optional>
#include <vector>

#include "interpbound/geometry.hpp"

namespace interpbound::delaunay {

struct BoundParts {
  double gamma_hat = 0.0;
  double sigma_hat = 0.0;
  double k = 0.0;
  double h = 0.0;
  double lipschitz = 0.0;
  double residual = 0.0;
  /// Dimension of the simplex the bound was evaluated on.
  Eigen::Index dimension = 0;
  double bound_value = 0.0;

  double recompute() const;
};

struct Contribution {
  Eigen::Index index = 0;
  double weight = 0.0;
  double response = 0.0;
};

struct Prediction {
  double value = 0.0;
  geometry::SimplexLocation location;
  BoundParts bound;
  std::vector<Contribution> contributing;
};

struct BoundOptions {
  /// Use this mesh diameter instead of the located simplex's own diameter.
  std::optional<double> global_h;
};

/// For a two-vertex simplex (1-D data) `neighbor` supplies the third point of
/// the single available divided difference; without it the result is 0.
double local_gamma(const geometry::SimplexLocation& location, const Dataset& data,
                   std::optional<Eigen::Index> neighbor = std::nullopt);

BoundParts error_bound(const geometry::SimplexLocation& location, const Dataset& data, double lipschitz,
                       const BoundOptions& options = {}, std::optional<Eigen::Index> neighbor = std::nullopt);

/// Reusable interpolant: keeps the hull locator and the Lipschitz estimate.
class Interpolant {
 public:
  explicit Interpolant(Dataset data, BoundOptions options = {});

  const Dataset& data() const { return data_; }
  double lipschitz() const { return lipschitz_; }
  Prediction predict(const Vector& q) const;

 private:
  Dataset data_;
  BoundOptions options_;
  geometry::HullLocator locator_;
  double lipschitz_ = 0.0;
};

/// One-shot prediction; builds the locator and the Lipschitz estimate.
Prediction predict(const Vector& q, const Dataset& data);

}  // namespace interpbound::delaunay
