#include "interpbound/numkit.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "sobol_table.hpp"

namespace interpbound {

namespace numkit {

Matrix cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidArgument, "cholesky needs a square matrix");
  }
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteValue, "cholesky input has non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidArgument, "cholesky input is not symmetric");
  }
  Matrix sym = 0.5 * (m + m.transpose());
  auto factor = CholeskyFactor::factor(std::move(sym));
  if (!factor) throw Error(ErrorCode::NotPositiveDefinite, "non-positive pivot encountered");
  return factor->lower();
}

std::optional<CholeskyFactor> CholeskyFactor::factor(Matrix m) {
  Eigen::LLT<Matrix> llt(m.rows());
  llt.compute(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return CholeskyFactor(std::move(llt));
}

Vector CholeskyFactor::solve_lower(const Vector& rhs) const {
  return llt_.matrixL().solve(rhs);
}

double CholeskyFactor::half_log_det() const {
  return llt_.matrixLLT().diagonal().array().log().sum();
}

Vector svd_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();  // Eigen already sorts them descending
}

LeastSquaresResult least_squares(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "least_squares: rows(a) != length(b)");
  }
  if (a.rows() < a.cols()) {
    throw Error(ErrorCode::InvalidArgument, "least_squares: system is underdetermined");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  LeastSquaresResult result;
  result.x = cod.solve(b);
  result.rank = cod.rank();
  result.rank_deficient = result.rank < a.cols();
  return result;
}

std::string_view to_string(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::sobol: return "sobol";
    case SamplingMethod::latin_hypercube: return "lhs";
    case SamplingMethod::uniform: return "uniform";
  }
  return "sobol";
}

SamplingMethod parse_sampling_method(std::string_view name) {
  if (name == "sobol") return SamplingMethod::sobol;
  if (name == "lhs" || name == "latin_hypercube") return SamplingMethod::latin_hypercube;
  if (name == "uniform") return SamplingMethod::uniform;
  throw Error(ErrorCode::InvalidArgument, "unknown spacing '" + std::string(name) + "'");
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

namespace {

constexpr int kSobolBits = 32;

using DirectionNumbers = std::array<std::uint32_t, kSobolBits>;

DirectionNumbers sobol_directions(std::size_t dim) {
  DirectionNumbers v{};
  const auto& row = detail::kSobolSeeds[dim];
  const int degree = std::bit_width(row.polynomial) - 1;
  std::array<std::uint64_t, kSobolBits> m{};
  if (degree == 0) {
    m.fill(1);
  } else {
    for (int k = 0; k < degree; ++k) m[k] = row.initial[k];
    for (int k = degree; k < kSobolBits; ++k) {
      std::uint64_t next = m[k - degree] ^ (m[k - degree] << degree);
      for (int i = 1; i < degree; ++i) {
        if ((row.polynomial >> (degree - i)) & 1u) next ^= m[k - i] << i;
      }
      m[k] = next;
    }
  }
  for (int k = 0; k < kSobolBits; ++k) {
    v[k] = static_cast<std::uint32_t>(m[k] << (kSobolBits - 1 - k));
  }
  return v;
}

Matrix sample_sobol(const SeededSampler& sampler, std::size_t n) {
  const std::size_t d = sampler.dimension;
  if (d > detail::kSobolMaxDimension) {
    throw Error(ErrorCode::UnsupportedDimension,
                "Sobol direction numbers available up to d = " + std::to_string(detail::kSobolMaxDimension));
  }
  if (n > (std::size_t{1} << kSobolBits)) {
    throw Error(ErrorCode::InvalidArgument, "too many Sobol points requested");
  }
  std::vector<DirectionNumbers> directions(d);
  std::vector<std::uint32_t> shift(d, 0);
  Rng rng(sampler.seed);
  for (std::size_t j = 0; j < d; ++j) {
    directions[j] = sobol_directions(j);
    if (sampler.scramble) shift[j] = static_cast<std::uint32_t>(rng.next() >> 32);
  }
  Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t gray = i ^ (i >> 1);
    for (std::size_t j = 0; j < d; ++j) {
      std::uint32_t x = shift[j];
      for (std::uint64_t bits = gray; bits != 0; bits &= bits - 1) {
        x ^= directions[j][std::countr_zero(bits)];
      }
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(x) * 0x1.0p-32;
    }
  }
  return points;
}

Matrix sample_latin_hypercube(const SeededSampler& sampler, std::size_t n) {
  Rng rng(sampler.seed);
  const auto rows = static_cast<Eigen::Index>(n);
  Matrix points(rows, static_cast<Eigen::Index>(sampler.dimension));
  std::vector<std::size_t> strata(n);
  const double width = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng.engine());
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double k = static_cast<double>(strata[static_cast<std::size_t>(i)]);
      const double upper = (k + 1.0) * width;
      double x = (k + rng.uniform()) * width;
      // rounding can land exactly on the next stratum boundary
      if (x >= upper) x = std::nextafter(upper, 0.0);
      points(i, j) = x;
    }
  }
  return points;
}

Matrix sample_uniform(const SeededSampler& sampler, std::size_t n) {
  Rng rng(sampler.seed);
  Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sampler.dimension));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) points(i, j) = rng.uniform();
  }
  return points;
}

}  // namespace

std::size_t max_sobol_dimension() { return detail::kSobolMaxDimension; }

Matrix sample_unit_cube(const SeededSampler& sampler, std::size_t n) {
  if (n == 0 || sampler.dimension == 0) {
    throw Error(ErrorCode::InvalidArgument, "sample_unit_cube needs n >= 1 and dimension >= 1");
  }
  switch (sampler.method) {
    case SamplingMethod::sobol: return sample_sobol(sampler, n);
    case SamplingMethod::latin_hypercube: return sample_latin_hypercube(sampler, n);
    case SamplingMethod::uniform: return sample_uniform(sampler, n);
  }
  return {};
}

}  // namespace numkit
}  // namespace interpbound
