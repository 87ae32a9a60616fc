#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "interpbound/geometry.hpp"
#include "interpbound/report.hpp"
#include "interpbound/study.hpp"
#include "interpbound/synthetic.hpp"
#include "interpbound/validation.hpp"
#include "json.hpp"

using namespace interpbound;
using namespace interpbound::harness;

namespace {

StudyConfig tiny_config() {
  StudyConfig config;
  config.dimensions = {2};
  config.sizes = {64};
  config.seeds = {0};
  config.methods = {Method::delaunay, Method::tps, Method::gp};
  config.interpolation_queries = 10;
  config.extrapolation_queries = 10;
  config.fill_samples = 2000;
  return config;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Dataset synthetic_data(std::size_t d, std::size_t n, std::uint64_t seed, double omega = 0.0) {
  synthetic::SyntheticSpec spec;
  spec.d = d;
  spec.n = n;
  spec.seed = seed;
  spec.omega = omega;
  return synthetic::generate_dataset(spec);
}

}  // namespace

TEST_CASE("method names") {
  for (const auto m : {Method::delaunay, Method::tps, Method::gp, Method::mlp}) CHECK(parse_method(to_string(m)) == m);
  CHECK(parse_method_list("gp,delaunay,gp") == std::vector<Method>{Method::gp, Method::delaunay});
  CHECK_THROWS_AS(parse_method("kriging"), Error);
  CHECK(parse_study_kind("extrap") == StudyKind::extrapolation_hist);
  CHECK_THROWS_AS(parse_study_kind("other"), Error);
}

TEST_CASE("fitted methods share one interface") {
  const Dataset data = synthetic_data(2, 40, 1);
  MethodOptions options;
  options.mlp.hidden_layers = {8};
  options.mlp.max_epochs = 5;
  options.mlp.restarts = 1;
  for (const auto m : {Method::delaunay, Method::tps, Method::gp, Method::mlp}) {
    const auto fitted = fit_method(m, data, options);
    CHECK(fitted->method() == m);
    const auto p = fitted->predict(data.point(3));
    CHECK(std::isfinite(p.value));
    if (m == Method::mlp) {
      CHECK(std::isnan(p.bound));
    } else {
      CHECK(std::abs(p.value - data.responses(3)) < 1e-6);
      CHECK(p.bound >= 0.0);
    }
    CHECK(p.attribution.empty() == (m != Method::delaunay));
  }
}

TEST_CASE("study config JSON") {
  const auto defaults = StudyConfig::defaults(StudyKind::skew);
  CHECK(defaults.alphas == std::vector<double>{0.0, 10.0});
  CHECK(defaults.rescale == std::vector<bool>{false, true});
  const auto parsed = StudyConfig::from_json(R"({"sizes": [32, 64], "seeds": [3], "methods": ["gp"]})",
                                             StudyKind::variation);
  CHECK(parsed.sizes == std::vector<std::size_t>{32, 64});
  CHECK(parsed.seeds == std::vector<std::uint64_t>{3});
  CHECK(parsed.methods == std::vector<Method>{Method::gp});
  const auto round = StudyConfig::from_json(parsed.to_json(), StudyKind::variation);
  CHECK(round.to_json() == parsed.to_json());
  CHECK_THROWS_AS(StudyConfig::from_json(R"({"unknown_key": 1})", StudyKind::variation), Error);
  CHECK_THROWS_AS(StudyConfig::from_json(R"({"seeds": [1, 1]})", StudyKind::variation), Error);
  CHECK_THROWS_AS(StudyConfig::from_json(R"({"sizes": []})", StudyKind::variation), Error);
  CHECK_THROWS_AS(StudyConfig::from_json("not json", StudyKind::variation), Error);
  const auto slow = StudyConfig::from_json(R"({"mlp": {"conservative": true}})", StudyKind::variation);
  CHECK(slow.mlp.learning_rate == 1e-8);
}

TEST_CASE("study query points") {
  const auto config = tiny_config();
  const Matrix inner = study_queries(config, 0, 5, Regime::interpolation);
  const Matrix outer = study_queries(config, 0, 5, Regime::extrapolation);
  CHECK(inner.rows() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(inner.row(i).norm() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(outer.row(i).norm() == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(inner == study_queries(config, 0, 5, Regime::interpolation));
  auto single = config;
  single.single_query_per_seed = true;
  CHECK(study_queries(single, 0, 5, Regime::interpolation).rows() == 1);
  const Matrix tests = hull_test_points(3, 100, 2);
  CHECK(tests.minCoeff() >= -1.0);
  CHECK(tests.maxCoeff() <= 1.0);
}

TEST_CASE("skew moves the data but not the queries") {
  auto config = tiny_config();
  config.kind = StudyKind::skew;
  config.methods = {Method::delaunay};
  config.alphas = {0.0, 10.0};
  const auto report = skew_study(config);
  std::map<std::pair<int, std::size_t>, std::vector<double>> truth;
  for (const auto& r : report.records) truth[{static_cast<int>(r.regime), r.query}].push_back(r.true_value);
  CHECK(truth.size() == 20);
  for (const auto& [key, values] : truth) {
    REQUIRE(values.size() == 2);
    CHECK(values[0] == values[1]);
  }
  // against the flattened data most interpolation-sphere queries fall outside the hull
  std::size_t outside = 0;
  for (const auto& r : report.records) outside += r.alpha == 10.0 && r.regime == Regime::interpolation && !r.in_hull;
  CHECK(outside > 5);
}

TEST_CASE("single-cell study record count and summaries") {
  const auto config = tiny_config();
  const auto report = variation_study(config);
  CHECK(report.records.size() == 3 * 20);
  CHECK(report.summaries.size() == 3 * 2);
  CHECK(report.aggregates.size() == 3 * 2);
  for (const auto& r : report.records) {
    CHECK(r.error == doctest::Approx(std::abs(r.prediction - r.true_value)));
    if (r.regime == Regime::interpolation) CHECK(r.in_hull);
    if (r.regime == Regime::extrapolation) {
      CHECK_FALSE(r.in_hull);
      CHECK(r.residual > 0.0);
    }
  }
  // summaries are recomputable from the records
  for (const auto& s : report.summaries) {
    double error = 0.0, bound = 0.0, violations = 0.0;
    std::size_t count = 0;
    for (const auto& r : report.records) {
      if (r.method != s.method || r.regime != s.regime) continue;
      error += r.error;
      bound += r.bound;
      violations += r.bound < r.error ? 1.0 : 0.0;
      ++count;
    }
    CHECK(s.count == count);
    CHECK(std::abs(s.mean_error - error / count) <= 1e-12 * (1.0 + std::abs(s.mean_error)));
    CHECK(std::abs(s.mean_bound - bound / count) <= 1e-12 * (1.0 + std::abs(s.mean_bound)));
    CHECK(s.violation_rate == doctest::Approx(violations / count));
  }
}

TEST_CASE("study results do not depend on method order") {
  auto forward = tiny_config();
  auto backward = tiny_config();
  std::reverse(backward.methods.begin(), backward.methods.end());
  const auto a = variation_study(forward);
  const auto b = variation_study(backward);
  std::map<std::tuple<int, int, std::size_t>, double> values;
  for (const auto& r : a.records) values[{static_cast<int>(r.method), static_cast<int>(r.regime), r.query}] = r.prediction;
  REQUIRE(b.records.size() == a.records.size());
  for (const auto& r : b.records) {
    CHECK(values.at({static_cast<int>(r.method), static_cast<int>(r.regime), r.query}) == r.prediction);
  }
}

TEST_CASE("failed fits are flagged and the study continues") {
  auto config = tiny_config();
  config.sizes = {3, 64};  // n = 3 < d + 2 is too small for TPS
  const auto report = variation_study(config);
  bool flagged = false;
  for (const auto& s : report.summaries) {
    if (s.n == 3 && s.method == Method::tps) {
      CHECK(s.failed);
      CHECK(s.count == 0);
      CHECK_FALSE(s.failure.empty());
      flagged = true;
    }
  }
  CHECK(flagged);
  for (const auto& s : report.summaries) {
    if (s.n == 64) CHECK_FALSE(s.failed);
  }
}

TEST_CASE("hull histogram study") {
  StudyConfig config = StudyConfig::defaults(StudyKind::extrapolation_hist);
  config.dimensions = {2, 3};
  config.sizes = {64};
  config.test_points = 200;
  const auto report = extrapolation_histogram(config);
  CHECK(report.hull_records.size() == 2 * 200);
  CHECK(report.hull_fractions.size() == 2);
  for (const auto& h : report.hull_records) CHECK(h.norm <= std::sqrt(static_cast<double>(h.d)) + 1e-12);

  // independent pass of hull_side over the same points
  for (const auto& f : report.hull_fractions) {
    synthetic::SyntheticSpec spec;
    spec.d = f.d;
    spec.n = f.n;
    spec.seed = 0;
    const Dataset data = synthetic::generate_dataset(spec);
    const Matrix tests = hull_test_points(f.d, 200, 0);
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < tests.rows(); ++i) inside += geometry::hull_side(tests.row(i).transpose(), data).inside;
    CHECK(f.inside == inside);
    CHECK(f.fraction == doctest::Approx(static_cast<double>(inside) / 200.0));
  }
  std::size_t binned = 0;
  for (const auto& b : report.histogram) {
    CHECK(b.upper > b.lower);
    binned += b.inside + b.outside;
  }
  CHECK(binned == 400);
  CHECK(report.histogram.size() == 2 * config.histogram_bins);
}

TEST_CASE("validation on the training set") {
  const Dataset train = synthetic_data(3, 80, 2, 0.5);
  ValidationOptions options;
  options.fill_samples = 2000;
  const auto report = latent_validation(train, train, options);
  REQUIRE(report.summaries.size() == 3);
  for (const auto& s : report.summaries) {
    CHECK_FALSE(s.failed);
    CHECK(s.in_hull_fraction == 1.0);
    CHECK(s.all.mae < 1e-6);
  }
  for (const auto& r : report.records) {
    CHECK(r.error < 1e-6);
    if (r.method == Method::delaunay) {
      REQUIRE(r.attribution.size() >= 1);
      double weight = 0.0;
      for (const auto& c : r.attribution) weight += c.weight;
      CHECK(weight == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(latent_validation(train, synthetic_data(2, 10, 0), options), Error);
}

TEST_CASE("validation statistics and shift") {
  const Dataset train = synthetic_data(2, 100, 3, 1.0);
  Dataset eval = synthetic_data(2, 60, 4, 1.0);
  eval.points *= 1.3;  // some points leave the hull
  for (Eigen::Index i = 0; i < eval.size(); ++i) eval.responses(i) = synthetic::response_function(eval.point(i), 1.0);
  ValidationOptions options;
  options.fill_samples = 2000;
  options.shift = 0.2;
  const auto report = latent_validation(train, eval, options);
  for (const auto& s : report.summaries) {
    double mae = 0.0;
    std::size_t count = 0, inside = 0;
    for (const auto& r : report.records) {
      if (r.method != s.method) continue;
      mae += r.error;
      ++count;
      inside += r.in_hull;
    }
    CHECK(s.all.count == count);
    CHECK(s.all.mae == doctest::Approx(mae / count).epsilon(1e-12));
    CHECK(s.in_hull_fraction == doctest::Approx(static_cast<double>(inside) / count));
    CHECK(s.in_hull_fraction >= 0.0);
    CHECK(s.in_hull_fraction <= 1.0);
    CHECK(s.all.shifted_violation_rate <= s.all.violation_rate);
    CHECK(s.relative_mae == doctest::Approx(s.raw_mae / eval.responses.cwiseAbs().mean()));
  }
}

TEST_CASE("report emission") {
  const auto config = tiny_config();
  const StudyReport empty;
  CHECK(line_count(study_records_csv(empty)) == 1);
  CHECK(line_count(study_summary_csv(empty)) == 1);
  CHECK(line_count(hull_records_csv(empty)) == 1);
  CHECK(nlohmann::json::parse(study_json(empty, config))["records"].empty());

  auto two_cells = config;
  two_cells.sizes = {32, 64};
  const auto report = variation_study(two_cells);
  CHECK(line_count(study_records_csv(report)) == 1 + 3 * 2 * 20);
  CHECK(study_records_csv(report) == study_records_csv(report));

  const auto dir = std::filesystem::temp_directory_path() / "interpbound_report_test";
  std::filesystem::remove_all(dir);
  const auto files = emit_report(report, two_cells, {Format::csv, Format::json, Format::svg}, dir);
  CHECK(files.size() == 8);
  std::map<std::string, std::string> first;
  for (const auto& f : files) first[f.filename().string()] = read_file(f);
  emit_report(report, two_cells, {Format::csv, Format::json, Format::svg}, dir);
  for (const auto& f : files) CHECK(read_file(f) == first[f.filename().string()]);
  const auto doc = nlohmann::json::parse(first["report.json"]);
  CHECK(doc["records"].size() == report.records.size());
  CHECK(first["plot.svg"].starts_with("<svg"));
  std::filesystem::remove_all(dir);

  CHECK(parse_formats("json,csv,json") == std::vector<Format>{Format::json, Format::csv});
  CHECK_THROWS_AS(parse_formats("pdf"), Error);
  CHECK_THROWS_AS(emit_report(report, two_cells, {Format::csv}, "/proc/interpbound/forbidden"), Error);
}

TEST_CASE("validation report emission") {
  const Dataset train = synthetic_data(2, 50, 1);
  const Dataset eval = synthetic_data(2, 10, 2);
  ValidationOptions options;
  options.fill_samples = 1000;
  const auto report = latent_validation(train, eval, options);
  const std::string csv = validation_records_csv(report);
  CHECK(line_count(csv) == 1 + 3 * 10);
  CHECK(line_count(validation_summary_csv(report)) == 1 + 3);
  const auto doc = nlohmann::json::parse(validation_json(report));
  CHECK(doc["summaries"].size() == 3);
  CHECK(validation_svg(report).starts_with("<svg"));
  ValidationReport blank;
  CHECK(line_count(validation_records_csv(blank)) == 1);
}
