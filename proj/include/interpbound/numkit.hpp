#pragma once

// Dense numeric kernels shared by every interpolant: factorizations,
// singular values, least squares, and seeded sampling of the unit cube.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "interpbound/error.hpp"

namespace interpbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numkit {

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// The input is symmetrized before factoring. Throws NotPositiveDefinite if any
/// pivot is <= 0 and InvalidArgument if `m` is not square or not symmetric to
/// 1e-12 relative tolerance.
Matrix cholesky(const Matrix& m);

/// Factor that is kept around for repeated solves (GP variance queries).
class CholeskyFactor {
 public:
  CholeskyFactor() = default;
  /// Factors the lower triangle of `m` in place. Returns nullopt on a
  /// non-positive pivot instead of throwing.
  static std::optional<CholeskyFactor> factor(Matrix m);

  Eigen::Index size() const { return llt_.rows(); }
  Matrix lower() const { return llt_.matrixL(); }
  /// Diagonal of L.
  Vector pivots() const { return llt_.matrixLLT().diagonal(); }
  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }
  /// L^{-1} rhs.
  Vector solve_lower(const Vector& rhs) const;
  /// Sum of log of the diagonal of L, i.e. half of log det(m).
  double half_log_det() const;

 private:
  explicit CholeskyFactor(Eigen::LLT<Matrix> llt) : llt_(std::move(llt)) {}
  Eigen::LLT<Matrix> llt_;
};

/// Singular values in descending order; min(rows, cols) of them.
Vector svd_values(const Matrix& m);

struct LeastSquaresResult {
  Vector x;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
};

/// Minimizer of ||a x - b||; the minimum-norm one when `a` lacks full column
/// rank (flagged, not thrown).
LeastSquaresResult least_squares(const Matrix& a, const Vector& b);

enum class SamplingMethod { sobol, latin_hypercube, uniform };

std::string_view to_string(SamplingMethod method);
SamplingMethod parse_sampling_method(std::string_view name);

struct SeededSampler {
  SamplingMethod method = SamplingMethod::sobol;
  std::uint64_t seed = 0;
  std::size_t dimension = 1;
  /// Sobol only: apply the seeded digital shift.
  bool scramble = true;
};

std::size_t max_sobol_dimension();

/// n x d matrix of points in [0,1)^d, one point per row.
Matrix sample_unit_cube(const SeededSampler& sampler, std::size_t n);

/// Seeded generator used everywhere randomness is needed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace numkit
}  // namespace interpbound
