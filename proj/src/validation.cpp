#include "interpbound/validation.hpp"

#include <cmath>
#include <limits>

#include "interpbound/geometry.hpp"

namespace interpbound::harness {

namespace {

void accumulate(ValidationStats& stats, const ValidationRecord& r, double shift) {
  ++stats.count;
  stats.mae += r.error;
  stats.mean_bound += r.bound;
  if (r.bound < r.error) stats.violation_rate += 1.0;
  if (r.bound + shift < r.error) stats.shifted_violation_rate += 1.0;
}

void finish(ValidationStats& stats) {
  if (stats.count == 0) return;
  const double count = static_cast<double>(stats.count);
  stats.mae /= count;
  stats.mean_bound /= count;
  stats.violation_rate /= count;
  stats.shifted_violation_rate /= count;
}

}  // namespace

void summarize(ValidationReport& report, const Dataset& eval) {
  const double mean_abs_y = eval.responses.cwiseAbs().mean();
  for (auto& summary : report.summaries) {
    ValidationSummary s;
    s.method = summary.method;
    s.failed = summary.failed;
    s.failure = summary.failure;
    if (!s.failed) {
      for (const auto& r : report.records) {
        if (r.method != s.method) continue;
        accumulate(s.all, r, report.shift);
        if (r.in_hull) accumulate(s.in_hull, r, report.shift);
        s.raw_mae += r.raw_error;
        s.raw_mean_bound += r.raw_bound;
      }
      if (s.all.count > 0) {
        const double count = static_cast<double>(s.all.count);
        s.in_hull_fraction = static_cast<double>(s.in_hull.count) / count;
        s.raw_mae /= count;
        s.raw_mean_bound /= count;
        s.relative_mae = mean_abs_y > 0.0 ? s.raw_mae / mean_abs_y : std::numeric_limits<double>::quiet_NaN();
      }
      finish(s.all);
      finish(s.in_hull);
    }
    summary = std::move(s);
  }
}

ValidationReport latent_validation(const Dataset& train, const Dataset& eval, const ValidationOptions& options) {
  if (train.dimension() != eval.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "train has d = " + std::to_string(train.dimension()) +
                                                  ", eval has d = " + std::to_string(eval.dimension()));
  }
  if (options.methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods to validate");
  ValidationReport report;
  report.shift = options.shift;
  report.rescale = options.rescale;

  const Rescaler rescaler = options.rescale ? fit_rescaler(train) : Rescaler::identity(train.dimension());
  const Dataset model_train = apply_rescaler(rescaler, train, Direction::forward);
  const Dataset model_eval = apply_rescaler(rescaler, eval, Direction::forward);
  const geometry::HullLocator locator(model_train.points);
  std::vector<geometry::HullQueryResult> hull;
  for (Eigen::Index i = 0; i < model_eval.size(); ++i) hull.push_back(locator.project(model_eval.point(i)));

  MethodOptions method_options;
  method_options.mlp = options.mlp;
  method_options.fill_samples = options.fill_samples;
  method_options.seed = options.seed;

  for (const auto method : options.methods) {
    ValidationSummary summary;
    summary.method = method;
    std::vector<ValidationRecord> records;
    try {
      const auto fitted = fit_method(method, model_train, method_options);
      for (Eigen::Index i = 0; i < model_eval.size(); ++i) {
        const auto p = fitted->predict(model_eval.point(i));
        ValidationRecord r;
        r.index = static_cast<std::size_t>(i);
        r.method = method;
        r.true_value = model_eval.responses(i);
        r.prediction = p.value;
        r.error = std::abs(r.prediction - r.true_value);
        r.bound = p.bound;
        r.raw_true_value = eval.responses(i);
        r.raw_prediction = rescaler.inverse_value(p.value);
        r.raw_error = std::abs(r.raw_prediction - r.raw_true_value);
        r.raw_bound = p.bound * rescaler.output_scale;
        r.in_hull = hull[static_cast<std::size_t>(i)].inside;
        r.residual = hull[static_cast<std::size_t>(i)].residual;
        r.attribution = p.attribution;
        records.push_back(std::move(r));
      }
    } catch (const Error& e) {
      summary.failed = true;
      summary.failure = e.what();
      records.clear();
    }
    report.records.insert(report.records.end(), records.begin(), records.end());
    report.summaries.push_back(summary);
  }
  summarize(report, eval);
  return report;
}

}  // namespace interpbound::harness
