#include "interpbound/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "interpbound/lipschitz.hpp"

namespace interpbound::gp {

namespace {

constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

Matrix squared_distances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  const Matrix cols = points.transpose();
  Matrix d2 = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) d2(i, j) = (cols.col(i) - cols.col(j)).squaredNorm();
  }
  return d2;  // lower triangle only
}

Matrix kernel_lower(const Matrix& d2, double tau) {
  const Eigen::Index n = d2.rows();
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) a(i, j) = std::exp(-d2(i, j) / tau);
  }
  return a;
}

std::optional<numkit::CholeskyFactor> factor_kernel(const Matrix& kernel) {
  const Eigen::Index n = kernel.rows();
  auto factor = numkit::CholeskyFactor::factor(kernel);
  // A pivot at roundoff level means the kernel matrix is numerically
  // singular even though LLT did not break down.
  if (factor && factor->pivots().array().square().minCoeff() <=
                    static_cast<double>(n) * std::numeric_limits<double>::epsilon()) {
    return std::nullopt;
  }
  return factor;
}

struct Likelihood {
  double value = kMinusInfinity;
  std::optional<numkit::CholeskyFactor> factor;
  Vector coefficients;
};

Likelihood evaluate(const Matrix& d2, const Vector& y, double tau) {
  Likelihood result;
  const Matrix kernel = kernel_lower(d2, tau);
  result.factor = factor_kernel(kernel);
  if (!result.factor) return result;
  result.coefficients = result.factor->solve(y);
  // One refinement step with the residual accumulated in extended precision;
  // the quadratic term is otherwise only good to cond(A) * eps.
  const Eigen::Index m = y.size();
  std::vector<long double> residual(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) residual[static_cast<std::size_t>(i)] = y(i);
  for (Eigen::Index j = 0; j < m; ++j) {
    const long double cj = result.coefficients(j);
    residual[static_cast<std::size_t>(j)] -= cj;
    long double row = 0.0L;
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const long double kij = kernel(i, j);
      residual[static_cast<std::size_t>(i)] -= kij * cj;
      row += kij * result.coefficients(i);
    }
    residual[static_cast<std::size_t>(j)] -= row;
  }
  Vector r(m);
  for (Eigen::Index i = 0; i < m; ++i) r(i) = static_cast<double>(residual[static_cast<std::size_t>(i)]);
  result.coefficients += result.factor->solve(r);
  long double quad = 0.0L;
  for (Eigen::Index i = 0; i < m; ++i) quad += static_cast<long double>(y(i)) * result.coefficients(i);
  const double n = static_cast<double>(m);
  result.value = -0.5 * static_cast<double>(quad) - result.factor->half_log_det() -
                 0.5 * n * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(result.value)) result.value = kMinusInfinity;
  return result;
}

double sample_variance(const Vector& y) {
  if (y.size() < 2) return 0.0;
  return (y.array() - y.mean()).square().sum() / static_cast<double>(y.size() - 1);
}

}  // namespace

Prediction Model::predict(const Vector& q) const {
  if (q.size() != centers.cols()) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from model");
  Vector phi(centers.rows());
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    phi(i) = std::exp(-(centers.row(i).transpose() - q).squaredNorm() / tau);
  }
  Prediction p;
  p.mean = coefficients.dot(phi) + t0;
  const double explained = factor.solve_lower(phi).squaredNorm();
  p.variance = std::max(tau_f * (1.0 - explained), 0.0);
  p.bound_value = 2.0 * std::sqrt(p.variance);
  return p;
}

TauRange tau_search_range(const Matrix& points) {
  const auto extent = pairwise_distance_extent(points);
  return {extent.min_nonzero * extent.min_nonzero, 10.0 * extent.max * extent.max};
}

std::optional<double> log_marginal_likelihood_centered(const Matrix& points, const Vector& y, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  if (points.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "point and response counts differ");
  const auto result = evaluate(squared_distances(points), y, tau);
  if (!result.factor) return std::nullopt;
  return result.value;
}

std::optional<double> log_marginal_likelihood(const Dataset& data, double tau) {
  const Vector y = data.responses.array() - data.responses.mean();
  return log_marginal_likelihood_centered(data.points, y, tau);
}

Model fit_fixed(const Dataset& data, double tau, double tau_f) {
  Model model;
  model.centers = data.points;
  model.tau = tau;
  model.tau_f = tau_f;
  model.t0 = data.responses.mean();
  const Vector y = data.responses.array() - model.t0;
  auto result = evaluate(squared_distances(data.points), y, tau);
  if (!result.factor) throw Error(ErrorCode::NotPositiveDefinite, "kernel matrix has no Cholesky factor at this tau");
  model.factor = std::move(*result.factor);
  model.coefficients = std::move(result.coefficients);
  model.log_likelihood = result.value;
  model.tau_lower = model.tau_upper = tau;
  return model;
}

Model fit(const Dataset& data, const FitOptions& options) {
  const Eigen::Index n = data.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "GP fit needs at least two points");
  if (min_pairwise_distance(data.points) <= 1e-12) {
    throw Error(ErrorCode::DuplicatePoints, "GP interpolation is ill-posed with coincident points");
  }
  const TauRange range = tau_search_range(data.points);
  const Matrix d2 = squared_distances(data.points);
  const double t0 = data.responses.mean();
  const Vector y = data.responses.array() - t0;

  // search in log(tau); each evaluation costs one dense factorization
  const double lo = std::log(range.lower);
  const double hi = std::log(range.upper);
  const int grid = std::max(options.grid_points, 2);
  std::vector<double> nodes(static_cast<std::size_t>(grid));
  std::vector<double> values(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) {
    nodes[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (grid - 1);
    values[static_cast<std::size_t>(k)] = evaluate(d2, y, std::exp(nodes[static_cast<std::size_t>(k)])).value;
  }
  std::vector<int> order(static_cast<std::size_t>(grid));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
  });
  if (values[static_cast<std::size_t>(order[0])] == kMinusInfinity) {
    throw Error(ErrorCode::AllInfeasible, "no tau in [" + format_real(range.lower) + ", " +
                                              format_real(range.upper) + "] gives a positive definite kernel");
  }

  double best_node = nodes[static_cast<std::size_t>(order[0])];
  double best_value = values[static_cast<std::size_t>(order[0])];
  const double width_tolerance = std::log1p(options.relative_tolerance);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int s = 0; s < std::min(options.refine_starts, grid); ++s) {
    const int k = order[static_cast<std::size_t>(s)];
    if (values[static_cast<std::size_t>(k)] == kMinusInfinity) break;
    double a = nodes[static_cast<std::size_t>(std::max(k - 1, 0))];
    double b = nodes[static_cast<std::size_t>(std::min(k + 1, grid - 1))];
    // a neighbour of an earlier start whose bracket already holds the
    // refined optimum would only repeat that search
    if (s > 0 && a < best_node && best_node < b) continue;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = evaluate(d2, y, std::exp(c)).value;
    double fd = evaluate(d2, y, std::exp(d)).value;
    while (b - a > width_tolerance) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = evaluate(d2, y, std::exp(c)).value;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = evaluate(d2, y, std::exp(d)).value;
      }
    }
    for (const auto& [node, value] : {std::pair{c, fc}, std::pair{d, fd}}) {
      if (value > best_value) {
        best_value = value;
        best_node = node;
      }
    }
  }

  Model model = fit_fixed(data, std::exp(best_node), sample_variance(data.responses));
  model.tau_lower = range.lower;
  model.tau_upper = range.upper;
  return model;
}

}  // namespace interpbound::gp
