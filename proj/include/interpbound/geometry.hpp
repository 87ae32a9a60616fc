#pragma once

// Convex-hull membership, projection onto the hull, and Delaunay simplex
// location by the lifted-paraboloid linear program
//
//   min sum_i w_i |x_i|^2   s.t.  sum_i w_i x_i = q,  sum_i w_i = 1,  w >= 0.
//
// The support of an optimal basic solution is the vertex set of the Delaunay
// simplex containing q (lower hull of the points lifted onto the paraboloid).

#include <vector>

#include "interpbound/dataset.hpp"

namespace interpbound::geometry {

struct HullWeight {
  Eigen::Index index = 0;
  double weight = 0.0;
};

struct HullQueryResult {
  bool inside = false;
  /// Equals the query when inside; only meaningful if projection_available.
  Vector projected_point;
  double residual = 0.0;
  std::vector<HullWeight> hull_weights;
  bool projection_available = false;
  /// False when the projection hit its iteration cap; the point is then the
  /// best iterate and duality_gap says how far from optimal it is.
  bool converged = true;
  double duality_gap = 0.0;
};

struct SimplexLocation {
  std::vector<Eigen::Index> vertex_indices;
  Vector weights;
  Eigen::Index base_vertex_index = 0;
  bool was_projected = false;
  double residual = 0.0;
  /// The point the weights reproduce: the query, or its hull projection.
  Vector located_point;
  /// Dimension of the affine hull of the data (< d for degenerate data).
  Eigen::Index affine_dimension = 0;
  bool projection_converged = true;
};

struct LocatorOptions {
  double feasibility_tolerance = 1e-9;
  double rank_tolerance = 1e-10;
  double projection_gap = 1e-10;
  int projection_max_iterations = 10000;
};

/// Preprocesses a point set once so that many queries can share the work.
/// The points are copied; the locator holds no reference to the input.
class HullLocator {
 public:
  explicit HullLocator(const Matrix& points, LocatorOptions options = {});

  Eigen::Index dimension() const { return centroid_.size(); }
  Eigen::Index size() const { return reduced_.cols(); }
  Eigen::Index affine_dimension() const { return reduced_.rows(); }

  /// Membership only (projection fields are left empty).
  HullQueryResult side(const Vector& q) const;
  HullQueryResult project(const Vector& q) const;
  SimplexLocation locate(const Vector& q) const;

 private:
  Vector reduce(const Vector& q, double& orthogonal) const;
  Vector lift(const Vector& y) const;

  LocatorOptions options_;
  Matrix points_;
  Vector centroid_;
  Matrix basis_;   // d x r, orthonormal columns
  double scale_ = 1.0;
  Matrix reduced_; // r x n, one point per column
  Vector lifted_cost_;
};

HullQueryResult hull_side(const Vector& q, const Dataset& data);
HullQueryResult project_to_hull(const Vector& q, const Dataset& data);
SimplexLocation delaunay_locate(const Vector& q, const Dataset& data);

/// Barycentric weights of q with respect to the rows of `vertices`
/// (k+1 points, k <= d). Throws SingularSimplex when the edge matrix has
/// smallest singular value below 1e-12 times the largest.
Vector barycentric_weights(const Matrix& vertices, const Vector& q);

}  // namespace interpbound::geometry
