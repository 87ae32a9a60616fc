#pragma once

// Empirical studies over synthetic data: error and bound versus n, d,
// roughness and skew for each method, and the hull-membership histogram of
// uniform test points.

#include <string>
#include <vector>

#include "interpbound/methods.hpp"
#include "interpbound/synthetic.hpp"

namespace interpbound::harness {

enum class StudyKind { variation, skew, extrapolation_hist };

std::string_view to_string(StudyKind kind);
/// Accepts "variation", "skew", "extrap" and "extrapolation_hist".
StudyKind parse_study_kind(std::string_view name);

enum class Regime { interpolation, extrapolation };
std::string_view to_string(Regime regime);

struct StudyConfig {
  StudyKind kind = StudyKind::variation;
  std::vector<std::size_t> dimensions{5};
  std::vector<std::size_t> sizes{256, 1024, 4096};
  std::vector<double> omegas{0.0};
  std::vector<double> alphas{0.0};
  numkit::SamplingMethod spacing = numkit::SamplingMethod::sobol;
  std::vector<bool> rescale{false};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<Method> methods{Method::delaunay, Method::tps, Method::gp, Method::mlp};
  std::size_t interpolation_queries = 100;
  std::size_t extrapolation_queries = 100;
  double interpolation_radius = 0.1;
  double extrapolation_radius = 2.0;
  /// One query per seed and regime instead of the configured counts.
  bool single_query_per_seed = false;
  /// Uniform test points per (d, n, seed) for the hull histogram.
  std::size_t test_points = 1024;
  std::size_t histogram_bins = 20;
  bool evaluate_before_skew = false;
  std::size_t fill_samples = 10000;
  mlp::Config mlp;

  /// Defaults for a kind: skew studies compare alpha {0, 10} with and
  /// without rescaling.
  static StudyConfig defaults(StudyKind kind);
  /// Missing keys keep the kind's defaults. Throws InvalidArgument.
  static StudyConfig from_json(const std::string& text, StudyKind kind);
  std::string to_json() const;
  void validate() const;
};

struct QueryRecord {
  std::size_t d = 0;
  std::size_t n = 0;
  double omega = 0.0;
  double alpha = 0.0;
  bool rescale = false;
  std::uint64_t seed = 0;
  Method method = Method::delaunay;
  Regime regime = Regime::interpolation;
  std::size_t query = 0;
  double true_value = 0.0;
  double prediction = 0.0;
  double error = 0.0;
  double bound = 0.0;
  bool in_hull = false;
  double residual = 0.0;
};

/// One (cell, method, seed, regime) unit. A failed fit leaves count 0.
struct CellSummary {
  std::size_t d = 0;
  std::size_t n = 0;
  double omega = 0.0;
  double alpha = 0.0;
  bool rescale = false;
  std::uint64_t seed = 0;
  Method method = Method::delaunay;
  Regime regime = Regime::interpolation;
  std::size_t count = 0;
  double mean_error = 0.0;
  double mean_bound = 0.0;
  /// Fraction of queries with bound < error.
  double violation_rate = 0.0;
  bool failed = false;
  std::string failure;
};

/// Seed means of the cell summaries that did not fail.
struct Aggregate {
  std::size_t d = 0;
  std::size_t n = 0;
  double omega = 0.0;
  double alpha = 0.0;
  bool rescale = false;
  Method method = Method::delaunay;
  Regime regime = Regime::interpolation;
  std::size_t seeds = 0;
  std::size_t failed_seeds = 0;
  double mean_error = 0.0;
  double mean_bound = 0.0;
  double violation_rate = 0.0;
};

struct HullRecord {
  std::size_t d = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  double norm = 0.0;
  bool inside = false;
};

struct HistogramBin {
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t bin = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t inside = 0;
  std::size_t outside = 0;
};

struct HullFraction {
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t count = 0;
  std::size_t inside = 0;
  double fraction = 0.0;
};

struct StudyReport {
  StudyKind kind = StudyKind::variation;
  std::vector<QueryRecord> records;
  std::vector<CellSummary> summaries;
  std::vector<Aggregate> aggregates;
  std::vector<HullRecord> hull_records;
  std::vector<HistogramBin> histogram;
  std::vector<HullFraction> hull_fractions;
};

/// Query points for one (seed, d, regime): the same across n, omega and alpha
/// so that cells are compared on identical queries. Unskewed.
Matrix study_queries(const StudyConfig& config, std::uint64_t seed, std::size_t d, Regime regime);

/// Uniform test points in [-1,1]^d for the hull histogram. Unskewed.
Matrix hull_test_points(std::size_t d, std::size_t count, std::uint64_t seed);

StudyReport run_study(const StudyConfig& config);

StudyReport variation_study(StudyConfig config);
StudyReport skew_study(StudyConfig config);
StudyReport extrapolation_histogram(StudyConfig config);

/// Recomputes summaries and aggregates from the per-query records (and
/// fractions/histogram from hull records); failed cells are carried over.
void summarize(StudyReport& report, const StudyConfig& config);

}  // namespace interpbound::harness
