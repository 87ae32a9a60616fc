#pragma once

// Gaussian-process interpolation: Gaussian kernel exp(-|q - x|^2 / tau) with
// a constant tail t0 (the response mean), tau chosen by maximum likelihood,
// and a two-standard-deviation error estimate from the posterior variance.

#include <optional>

#include "interpbound/dataset.hpp"

namespace interpbound::gp {

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  double bound_value = 0.0;
};

struct Model {
  Matrix centers;
  Vector coefficients;
  double tau = 1.0;
  double tau_f = 1.0;
  double t0 = 0.0;
  double log_likelihood = 0.0;
  double tau_lower = 0.0;
  double tau_upper = 0.0;
  numkit::CholeskyFactor factor;

  /// The variance is clamped at 0; bound_value = 2 sqrt(variance).
  Prediction predict(const Vector& q) const;
};

/// Search interval [(min nonzero distance)^2, 10 (max distance)^2].
struct TauRange {
  double lower = 0.0;
  double upper = 0.0;
};
TauRange tau_search_range(const Matrix& points);

/// Log marginal likelihood of tail-removed responses `y`; nullopt when the
/// kernel matrix has no Cholesky factor at this tau.
std::optional<double> log_marginal_likelihood_centered(const Matrix& points, const Vector& y, double tau);

/// Same, with the tail (response mean) removed from data.responses first.
std::optional<double> log_marginal_likelihood(const Dataset& data, double tau);

struct FitOptions {
  int grid_points = 32;
  int refine_starts = 3;
  double relative_tolerance = 1e-3;
};

/// Throws AllInfeasible when no tau in range admits a factorization,
/// DuplicatePoints on coincident inputs, InvalidArgument when n < 2.
Model fit(const Dataset& data, const FitOptions& options = {});

/// Builds a model at a given tau (and tau_f) without searching.
Model fit_fixed(const Dataset& data, double tau, double tau_f);

inline Prediction predict(const Model& model, const Vector& q) { return model.predict(q); }

}  // namespace interpbound::gp
