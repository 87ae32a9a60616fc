#pragma once

// Procedural benchmark data: sampled inputs in [-1,1]^d with optional
// coordinate skew, and a paraboloid-plus-cosine response whose roughness is
// set by omega.

#include "interpbound/dataset.hpp"

namespace interpbound::synthetic {

struct SyntheticSpec {
  std::size_t d = 2;
  std::size_t n = 16;
  numkit::SamplingMethod spacing = numkit::SamplingMethod::sobol;
  std::uint64_t seed = 0;
  double omega = 0.0;
  double alpha = 0.0;
  /// Evaluate responses at the unskewed samples instead of the skewed ones.
  bool evaluate_before_skew = false;
};

/// f(x) = 0.5 * (mean_j z_j^2 - prod_j cos(2 pi omega z_j)), z_j = x_j - 1/2.
double response_function(const Vector& x, double omega);

/// Scales coordinate j (1-indexed) by exp(-(j-1) alpha / (d+1)).
Matrix apply_skew(const Matrix& points, double alpha);
Vector apply_skew(const Vector& point, double alpha);

Dataset generate_dataset(const SyntheticSpec& spec);

/// `count` points with Euclidean norm `radius`, directions from normalized
/// standard Gaussian vectors.
Matrix sample_sphere(std::size_t d, double radius, std::size_t count, std::uint64_t seed);

}  // namespace interpbound::synthetic
