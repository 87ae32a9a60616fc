#pragma once

#include "interpbound/dataset.hpp"

namespace interpbound {

/// Pairwise sizes above which lipschitz_estimate samples pairs.
inline constexpr Eigen::Index kExactLipschitzLimit = 4500;
inline constexpr std::size_t kLipschitzSamplePairs = 10'000'000;

/// max |y_i - y_j| / |x_i - x_j| over all pairs, or over seeded random pairs
/// when n > kExactLipschitzLimit. Throws DuplicatePoints on coincident inputs
/// (distance <= 1e-12) that are visited, InvalidArgument when n < 2.
double lipschitz_estimate(const Dataset& data, std::uint64_t seed = 0);

/// Smallest and largest pairwise distance (exact, O(n^2)). The minimum skips
/// zero distances; it is 0 only if every pair coincides.
struct DistanceExtent {
  double min_nonzero = 0.0;
  double max = 0.0;
};
DistanceExtent pairwise_distance_extent(const Matrix& points);

/// Smallest pairwise distance, zero included.
double min_pairwise_distance(const Matrix& points);

}  // namespace interpbound
