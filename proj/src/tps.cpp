#include "interpbound/tps.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

#include "interpbound/lipschitz.hpp"

namespace interpbound::tps {

double kernel(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }

double Model::predict(const Vector& q) const {
  if (q.size() != centers.cols()) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from model");
  double value = tail_slope.dot(q) + tail_intercept;
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    value += coefficients(i) * kernel((centers.row(i).transpose() - q).norm());
  }
  return value;
}

Model fit(const Dataset& data) {
  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dimension();
  if (n < d + 2) throw Error(ErrorCode::InvalidArgument, "TPS fit needs n >= d + 2");
  if (min_pairwise_distance(data.points) <= 1e-12) {
    throw Error(ErrorCode::DuplicatePoints, "TPS interpolation is ill-posed with coincident points");
  }

  Model model;
  model.centers = data.points;
  model.responses = data.responses;

  Matrix design(n, d + 1);
  design.leftCols(d) = data.points;
  design.col(d).setOnes();
  const auto tail = numkit::least_squares(design, data.responses);
  model.tail_slope = tail.x.head(d);
  model.tail_intercept = tail.x(d);
  const Vector rhs = data.responses - design * tail.x;

  const Matrix cols = data.points.transpose();
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double value = kernel((cols.col(i) - cols.col(j)).norm());
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    model.coefficients = Vector::Zero(n);
    return model;
  }
  // symmetric but indefinite, so no Cholesky here
  Eigen::PartialPivLU<Matrix> lu(a);
  model.coefficients = lu.solve(rhs);
  model.solve_residual = (a * model.coefficients - rhs).norm() / rhs_norm;
  if (!model.coefficients.allFinite() || !(model.solve_residual <= 1e-6)) {
    throw Error(ErrorCode::NearSingularSystem,
                "TPS kernel solve relative residual " + format_real(model.solve_residual) + " exceeds 1e-6");
  }
  return model;
}

Box bounding_box(const Matrix& points) {
  return {points.colwise().minCoeff().transpose(), points.colwise().maxCoeff().transpose()};
}

Box cube(Eigen::Index d, double lo, double hi) { return {Vector::Constant(d, lo), Vector::Constant(d, hi)}; }

double fill_distance(const Dataset& data, const Box& region, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "fill distance needs at least one sample");
  const Eigen::Index d = data.dimension();
  if (region.lower.size() != d || region.upper.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "region dimension differs from data");
  }
  numkit::Rng rng(seed);
  const Matrix cols = data.points.transpose();
  Vector sample(d);
  double fill = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    for (Eigen::Index j = 0; j < d; ++j) sample(j) = rng.uniform(region.lower(j), region.upper(j));
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < cols.cols(); ++i) nearest = std::min(nearest, (cols.col(i) - sample).squaredNorm());
    fill = std::max(fill, nearest);
  }
  return std::sqrt(fill);
}

BoundParts practical_bound(double lipschitz, double h) {
  BoundParts parts;
  parts.lipschitz = lipschitz;
  parts.fill_distance = h;
  const double factor = h > 0.0 ? std::max(1.0, std::sqrt(std::abs(std::log(h)))) : 1.0;
  parts.bound_value = lipschitz * h * factor;
  return parts;
}

}  // namespace interpbound::tps
