#include "interpbound/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace interpbound::synthetic {

double response_function(const Vector& x, double omega) {
  const double d = static_cast<double>(x.size());
  double squares = 0.0;
  double product = 1.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double z = x(j) - 0.5;
    squares += z * z;
    product *= std::cos(2.0 * std::numbers::pi * omega * z);
  }
  return 0.5 * (squares / d - product);
}

namespace {

Vector skew_factors(Eigen::Index d, double alpha) {
  Vector factors(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    factors(j) = std::exp(-static_cast<double>(j) * alpha / static_cast<double>(d + 1));
  }
  return factors;
}

}  // namespace

Matrix apply_skew(const Matrix& points, double alpha) {
  if (alpha == 0.0) return points;
  const Vector factors = skew_factors(points.cols(), alpha);
  return points * factors.asDiagonal();
}

Vector apply_skew(const Vector& point, double alpha) {
  if (alpha == 0.0) return point;
  return point.cwiseProduct(skew_factors(point.size(), alpha));
}

Dataset generate_dataset(const SyntheticSpec& spec) {
  if (spec.d < 1 || spec.n < 1) throw Error(ErrorCode::InvalidArgument, "synthetic data needs d >= 1 and n >= 1");
  if (!(spec.omega >= 0.0) || !(spec.alpha >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "omega and alpha must be nonnegative");
  }
  numkit::SeededSampler sampler{spec.spacing, spec.seed, spec.d, true};
  const Matrix raw = (2.0 * numkit::sample_unit_cube(sampler, spec.n).array() - 1.0).matrix();
  Matrix skewed = apply_skew(raw, spec.alpha);
  const Matrix& evaluated = spec.evaluate_before_skew ? raw : skewed;
  Vector y(evaluated.rows());
  for (Eigen::Index i = 0; i < evaluated.rows(); ++i) {
    y(i) = response_function(evaluated.row(i).transpose(), spec.omega);
  }
  return Dataset(std::move(skewed), std::move(y));
}

Matrix sample_sphere(std::size_t d, double radius, std::size_t count, std::uint64_t seed) {
  if (d < 1 || count < 1 || !(radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sphere sampling needs d >= 1, count >= 1 and radius > 0");
  }
  numkit::Rng rng(seed);
  Matrix points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Vector g(points.cols());
    double norm = 0.0;
    // a zero Gaussian vector has probability zero, but redraw anyway
    while (!(norm > 0.0)) {
      for (Eigen::Index j = 0; j < g.size(); ++j) g(j) = rng.normal();
      norm = g.norm();
    }
    points.row(i) = (radius / norm) * g.transpose();
  }
  return points;
}

}  // namespace interpbound::synthetic
