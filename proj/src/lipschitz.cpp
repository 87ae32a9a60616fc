#include "interpbound/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace interpbound {

namespace {

constexpr double kDuplicateDistance = 1e-12;

double pair_slope(const Dataset& data, Eigen::Index i, Eigen::Index j) {
  const double distance = (data.points.row(i) - data.points.row(j)).norm();
  if (distance <= kDuplicateDistance) {
    throw Error(ErrorCode::DuplicatePoints,
                "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  }
  return std::abs(data.responses(i) - data.responses(j)) / distance;
}

}  // namespace

double lipschitz_estimate(const Dataset& data, std::uint64_t seed) {
  const Eigen::Index n = data.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Lipschitz estimate needs at least two points");
  double best = 0.0;
  if (n <= kExactLipschitzLimit) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) best = std::max(best, pair_slope(data, i, j));
    }
    return best;
  }
  numkit::Rng rng(seed);
  const auto count = static_cast<std::size_t>(n);
  for (std::size_t s = 0; s < kLipschitzSamplePairs; ++s) {
    const auto i = static_cast<Eigen::Index>(rng.index(count));
    auto j = static_cast<Eigen::Index>(rng.index(count - 1));
    if (j >= i) ++j;
    best = std::max(best, pair_slope(data, i, j));
  }
  return best;
}

DistanceExtent pairwise_distance_extent(const Matrix& points) {
  DistanceExtent extent;
  double min_sq = std::numeric_limits<double>::infinity();
  double max_sq = 0.0;
  const Matrix cols = points.transpose();
  for (Eigen::Index i = 0; i < cols.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < cols.cols(); ++j) {
      const double sq = (cols.col(i) - cols.col(j)).squaredNorm();
      if (sq > 0.0) min_sq = std::min(min_sq, sq);
      max_sq = std::max(max_sq, sq);
    }
  }
  extent.min_nonzero = std::isfinite(min_sq) ? std::sqrt(min_sq) : 0.0;
  extent.max = std::sqrt(max_sq);
  return extent;
}

double min_pairwise_distance(const Matrix& points) {
  double min_sq = std::numeric_limits<double>::infinity();
  const Matrix cols = points.transpose();
  for (Eigen::Index i = 0; i < cols.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < cols.cols(); ++j) {
      min_sq = std::min(min_sq, (cols.col(i) - cols.col(j)).squaredNorm());
    }
  }
  return std::isfinite(min_sq) ? std::sqrt(min_sq) : std::numeric_limits<double>::infinity();
}

}  // namespace interpbound
