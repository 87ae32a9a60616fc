#pragma once

// Validation of a surrogate on held-out data (e.g. latent embeddings exported
// from an external encoder): per-point true error against each method's
// computable bound, hull membership, and Delaunay attribution.

#include <string>
#include <vector>

#include "interpbound/methods.hpp"

namespace interpbound::harness {

struct ValidationOptions {
  std::vector<Method> methods{Method::delaunay, Method::tps, Method::gp};
  /// Constant added to every bound for the shifted violation rate; 0 = off.
  double shift = 0.0;
  bool rescale = true;
  mlp::Config mlp;
  std::size_t fill_samples = 10000;
  std::uint64_t seed = 0;
};

struct ValidationRecord {
  std::size_t index = 0;
  Method method = Method::delaunay;
  /// Error and bound are in rescaled output units; raw_* in data units.
  double true_value = 0.0;
  double prediction = 0.0;
  double error = 0.0;
  double bound = 0.0;
  double raw_true_value = 0.0;
  double raw_prediction = 0.0;
  double raw_error = 0.0;
  double raw_bound = 0.0;
  bool in_hull = false;
  double residual = 0.0;
  /// Delaunay only; indices refer to rows of the training set.
  std::vector<delaunay::Contribution> attribution;
};

struct ValidationStats {
  std::size_t count = 0;
  double mae = 0.0;
  double mean_bound = 0.0;
  double violation_rate = 0.0;
  double shifted_violation_rate = 0.0;
};

struct ValidationSummary {
  Method method = Method::delaunay;
  bool failed = false;
  std::string failure;
  ValidationStats all;
  ValidationStats in_hull;
  double in_hull_fraction = 0.0;
  double raw_mae = 0.0;
  double raw_mean_bound = 0.0;
  /// raw MAE divided by the mean |y| of the evaluation responses.
  double relative_mae = 0.0;
};

struct ValidationReport {
  double shift = 0.0;
  bool rescale = true;
  std::vector<ValidationRecord> records;
  std::vector<ValidationSummary> summaries;
};

/// Throws DimensionMismatch when train and eval disagree on d; per-method
/// fit failures are flagged in the summary.
ValidationReport latent_validation(const Dataset& train, const Dataset& eval, const ValidationOptions& options);

/// Rebuilds the summaries from the records (failed methods are kept).
void summarize(ValidationReport& report, const Dataset& eval);

}  // namespace interpbound::harness
