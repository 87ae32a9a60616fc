#include "interpbound/study.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "interpbound/geometry.hpp"
#include "json.hpp"

namespace interpbound::harness {

using Json = nlohmann::ordered_json;

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::variation: return "variation";
    case StudyKind::skew: return "skew";
    case StudyKind::extrapolation_hist: return "extrap";
  }
  return "variation";
}

StudyKind parse_study_kind(std::string_view name) {
  if (name == "variation") return StudyKind::variation;
  if (name == "skew") return StudyKind::skew;
  if (name == "extrap" || name == "extrapolation_hist") return StudyKind::extrapolation_hist;
  throw Error(ErrorCode::InvalidArgument, "unknown study kind '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime) {
  return regime == Regime::interpolation ? "interpolation" : "extrapolation";
}

StudyConfig StudyConfig::defaults(StudyKind kind) {
  StudyConfig config;
  config.kind = kind;
  if (kind == StudyKind::skew) {
    config.alphas = {0.0, 10.0};
    config.rescale = {false, true};
  } else if (kind == StudyKind::extrapolation_hist) {
    config.dimensions = {2, 5, 11};
    config.sizes = {256, 4096, 16384};
    config.seeds = {0};
  }
  return config;
}

namespace {

CellSummary cell_summary(std::size_t d, std::size_t n, double omega, double alpha, bool rescale, std::uint64_t seed,
                         Method method, Regime regime) {
  CellSummary s;
  s.d = d;
  s.n = n;
  s.omega = omega;
  s.alpha = alpha;
  s.rescale = rescale;
  s.seed = seed;
  s.method = method;
  s.regime = regime;
  return s;
}

template <typename T>
std::vector<T> read_list(const Json& value, const char* key) {
  if (value.is_array()) return value.get<std::vector<T>>();
  if constexpr (std::is_same_v<T, bool>) {
    if (value.is_boolean()) return {value.get<bool>()};
  } else {
    if (value.is_number()) return {value.get<T>()};
  }
  throw Error(ErrorCode::InvalidArgument, std::string("config key '") + key + "' has the wrong type");
}

}  // namespace

StudyConfig StudyConfig::from_json(const std::string& text, StudyKind kind) {
  StudyConfig config = defaults(kind);
  try {
    const Json doc = Json::parse(text);
    if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "study config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "kind") {
        if (parse_study_kind(value.get<std::string>()) != kind) {
          throw Error(ErrorCode::InvalidArgument, "config kind '" + value.get<std::string>() +
                                                      "' does not match the requested study");
        }
      } else if (key == "dimensions") {
        config.dimensions = read_list<std::size_t>(value, "dimensions");
      } else if (key == "sizes") {
        config.sizes = read_list<std::size_t>(value, "sizes");
      } else if (key == "omegas") {
        config.omegas = read_list<double>(value, "omegas");
      } else if (key == "alphas") {
        config.alphas = read_list<double>(value, "alphas");
      } else if (key == "spacing") {
        config.spacing = numkit::parse_sampling_method(value.get<std::string>());
      } else if (key == "rescale") {
        config.rescale = read_list<bool>(value, "rescale");
      } else if (key == "seeds") {
        config.seeds = read_list<std::uint64_t>(value, "seeds");
      } else if (key == "methods") {
        config.methods.clear();
        if (value.is_string()) {
          config.methods = parse_method_list(value.get<std::string>());
        } else {
          for (const auto& name : value) config.methods.push_back(parse_method(name.get<std::string>()));
        }
      } else if (key == "interpolation_queries") {
        config.interpolation_queries = value.get<std::size_t>();
      } else if (key == "extrapolation_queries") {
        config.extrapolation_queries = value.get<std::size_t>();
      } else if (key == "interpolation_radius") {
        config.interpolation_radius = value.get<double>();
      } else if (key == "extrapolation_radius") {
        config.extrapolation_radius = value.get<double>();
      } else if (key == "single_query_per_seed") {
        config.single_query_per_seed = value.get<bool>();
      } else if (key == "test_points") {
        config.test_points = value.get<std::size_t>();
      } else if (key == "histogram_bins") {
        config.histogram_bins = value.get<std::size_t>();
      } else if (key == "evaluate_before_skew") {
        config.evaluate_before_skew = value.get<bool>();
      } else if (key == "fill_samples") {
        config.fill_samples = value.get<std::size_t>();
      } else if (key == "mlp") {
        if (value.value("conservative", false)) config.mlp = mlp::Config::conservative();
        for (const auto& [mkey, mvalue] : value.items()) {
          if (mkey == "conservative") continue;
          if (mkey == "hidden_layers") config.mlp.hidden_layers = mvalue.get<std::vector<int>>();
          else if (mkey == "learning_rate") config.mlp.learning_rate = mvalue.get<double>();
          else if (mkey == "batch_size") config.mlp.batch_size = mvalue.get<std::size_t>();
          else if (mkey == "validation_fraction") config.mlp.validation_fraction = mvalue.get<double>();
          else if (mkey == "early_stop_threshold") config.mlp.early_stop_threshold = mvalue.get<double>();
          else if (mkey == "max_epochs") config.mlp.max_epochs = mvalue.get<std::size_t>();
          else if (mkey == "restarts") config.mlp.restarts = mvalue.get<std::size_t>();
          else if (mkey == "seed") config.mlp.seed = mvalue.get<std::uint64_t>();
          else throw Error(ErrorCode::InvalidArgument, "unknown mlp config key '" + mkey + "'");
        }
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid study config: ") + e.what());
  }
  config.validate();
  return config;
}

std::string StudyConfig::to_json() const {
  Json doc;
  doc["kind"] = std::string(to_string(kind));
  doc["dimensions"] = dimensions;
  doc["sizes"] = sizes;
  doc["omegas"] = omegas;
  doc["alphas"] = alphas;
  doc["spacing"] = std::string(numkit::to_string(spacing));
  doc["rescale"] = rescale;
  doc["seeds"] = seeds;
  Json names = Json::array();
  for (const auto m : methods) names.push_back(std::string(harness::to_string(m)));
  doc["methods"] = names;
  doc["interpolation_queries"] = interpolation_queries;
  doc["extrapolation_queries"] = extrapolation_queries;
  doc["interpolation_radius"] = interpolation_radius;
  doc["extrapolation_radius"] = extrapolation_radius;
  doc["single_query_per_seed"] = single_query_per_seed;
  doc["test_points"] = test_points;
  doc["histogram_bins"] = histogram_bins;
  doc["evaluate_before_skew"] = evaluate_before_skew;
  doc["fill_samples"] = fill_samples;
  doc["mlp"] = {{"hidden_layers", mlp.hidden_layers}, {"learning_rate", mlp.learning_rate},
                {"batch_size", mlp.batch_size},       {"validation_fraction", mlp.validation_fraction},
                {"early_stop_threshold", mlp.early_stop_threshold},
                {"max_epochs", mlp.max_epochs},       {"restarts", mlp.restarts},
                {"seed", mlp.seed}};
  return doc.dump(2);
}

void StudyConfig::validate() const {
  auto fail = [](const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); };
  if (dimensions.empty() || sizes.empty() || omegas.empty() || alphas.empty() || rescale.empty() || seeds.empty()) {
    fail("study grids must be nonempty");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) fail("seeds must be distinct");
  for (const auto d : dimensions) {
    if (d < 1) fail("dimensions must be >= 1");
  }
  for (const auto n : sizes) {
    if (n < 1) fail("sizes must be >= 1");
  }
  for (const auto w : omegas) {
    if (!(w >= 0.0)) fail("omegas must be >= 0");
  }
  for (const auto a : alphas) {
    if (!(a >= 0.0)) fail("alphas must be >= 0");
  }
  if (kind != StudyKind::extrapolation_hist && methods.empty()) fail("methods must be nonempty");
  if (!(interpolation_radius > 0.0) || !(extrapolation_radius > 0.0)) fail("query radii must be positive");
  if (test_points < 1 || histogram_bins < 1 || fill_samples < 1) fail("counts must be >= 1");
  mlp.validate();
}

Matrix study_queries(const StudyConfig& config, std::uint64_t seed, std::size_t d, Regime regime) {
  const bool interp = regime == Regime::interpolation;
  std::size_t count = interp ? config.interpolation_queries : config.extrapolation_queries;
  if (config.single_query_per_seed) count = std::min<std::size_t>(count, 1);
  if (count == 0) return Matrix(0, static_cast<Eigen::Index>(d));
  numkit::Rng stream(seed, (static_cast<std::uint64_t>(d) << 8) | (interp ? 1u : 2u));
  return synthetic::sample_sphere(d, interp ? config.interpolation_radius : config.extrapolation_radius, count,
                                  stream.next());
}

Matrix hull_test_points(std::size_t d, std::size_t count, std::uint64_t seed) {
  numkit::Rng rng(seed, (static_cast<std::uint64_t>(d) << 8) | 3u);
  Matrix points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) points(i, j) = rng.uniform(-1.0, 1.0);
  }
  return points;
}

namespace {

void run_hull_study(const StudyConfig& config, StudyReport& report) {
  for (const auto d : config.dimensions) {
    for (const auto n : config.sizes) {
      for (const auto seed : config.seeds) {
        synthetic::SyntheticSpec spec{d, n, config.spacing, seed, config.omegas.front(), config.alphas.front(),
                                      config.evaluate_before_skew};
        const Dataset data = synthetic::generate_dataset(spec);
        const geometry::HullLocator locator(data.points);
        const Matrix tests = hull_test_points(d, config.test_points, seed);
        for (Eigen::Index i = 0; i < tests.rows(); ++i) {
          const Vector q = tests.row(i).transpose();
          report.hull_records.push_back({d, n, seed, static_cast<std::size_t>(i), q.norm(), locator.side(q).inside});
        }
      }
    }
  }
}

void run_method_study(const StudyConfig& config, StudyReport& report) {
  const std::array<Regime, 2> regimes{Regime::interpolation, Regime::extrapolation};
  for (const auto d : config.dimensions) {
    for (const auto n : config.sizes) {
      for (const auto omega : config.omegas) {
        for (const auto alpha : config.alphas) {
          for (const auto seed : config.seeds) {
            synthetic::SyntheticSpec spec{d, n, config.spacing, seed, omega, alpha, config.evaluate_before_skew};
            const Dataset data = synthetic::generate_dataset(spec);
            std::array<Matrix, 2> queries;
            std::array<Vector, 2> truth;
            for (std::size_t r = 0; r < 2; ++r) {
              // queries stay in the unskewed sampling domain; only the data is skewed
              queries[r] = study_queries(config, seed, d, regimes[r]);
              Matrix evaluated = queries[r];
              if (config.evaluate_before_skew) {
                const Vector ones = Vector::Ones(static_cast<Eigen::Index>(d));
                evaluated = queries[r] * synthetic::apply_skew(ones, alpha).cwiseInverse().asDiagonal();
              }
              truth[r].resize(evaluated.rows());
              for (Eigen::Index i = 0; i < evaluated.rows(); ++i) {
                truth[r](i) = synthetic::response_function(evaluated.row(i).transpose(), omega);
              }
            }
            for (const bool rescale : config.rescale) {
              const Rescaler rescaler = rescale ? fit_rescaler(data) : Rescaler::identity(data.dimension());
              const Dataset model_data = apply_rescaler(rescaler, data, Direction::forward);
              const geometry::HullLocator locator(model_data.points);
              std::array<Matrix, 2> model_queries;
              std::array<std::vector<geometry::HullQueryResult>, 2> hull;
              for (std::size_t r = 0; r < 2; ++r) {
                model_queries[r] = rescaler.forward_points(queries[r]);
                for (Eigen::Index i = 0; i < model_queries[r].rows(); ++i) {
                  hull[r].push_back(locator.project(model_queries[r].row(i).transpose()));
                }
              }
              MethodOptions options;
              options.mlp = config.mlp;
              options.mlp.seed = config.mlp.seed + seed;
              options.fill_samples = config.fill_samples;
              options.seed = seed;
              const Vector lower = synthetic::apply_skew(Vector(Vector::Constant(static_cast<Eigen::Index>(d), -1.0)), alpha);
              const Vector upper = synthetic::apply_skew(Vector(Vector::Constant(static_cast<Eigen::Index>(d), 1.0)), alpha);
              options.fill_region = tps::Box{rescaler.forward_point(lower), rescaler.forward_point(upper)};

              for (const auto method : config.methods) {
                CellSummary failure = cell_summary(d, n, omega, alpha, rescale, seed, method, Regime::interpolation);
                std::vector<QueryRecord> records;
                try {
                  const auto fitted = fit_method(method, model_data, options);
                  for (std::size_t r = 0; r < 2; ++r) {
                    for (Eigen::Index i = 0; i < model_queries[r].rows(); ++i) {
                      const auto p = fitted->predict(model_queries[r].row(i).transpose());
                      QueryRecord record{d, n, omega, alpha, rescale, seed, method, regimes[r]};
                      record.query = static_cast<std::size_t>(i);
                      record.true_value = truth[r](i);
                      record.prediction = rescaler.inverse_value(p.value);
                      record.error = std::abs(record.prediction - record.true_value);
                      record.bound = p.bound * rescaler.output_scale;
                      record.in_hull = hull[r][static_cast<std::size_t>(i)].inside;
                      record.residual = hull[r][static_cast<std::size_t>(i)].residual;
                      records.push_back(record);
                    }
                  }
                } catch (const Error& e) {
                  failure.failed = true;
                  failure.failure = e.what();
                }
                if (failure.failed) {
                  for (const auto regime : regimes) {
                    failure.regime = regime;
                    report.summaries.push_back(failure);
                  }
                } else {
                  report.records.insert(report.records.end(), records.begin(), records.end());
                }
              }
            }
          }
        }
      }
    }
  }
}

using CellKey = std::tuple<std::size_t, std::size_t, double, double, bool, std::uint64_t, int, int>;
using AggregateKey = std::tuple<std::size_t, std::size_t, double, double, bool, int, int>;

}  // namespace

void summarize(StudyReport& report, const StudyConfig& config) {
  std::map<CellKey, CellSummary> cells;
  for (const auto& s : report.summaries) {
    if (!s.failed) continue;
    cells[{s.d, s.n, s.omega, s.alpha, s.rescale, s.seed, static_cast<int>(s.method), static_cast<int>(s.regime)}] = s;
  }
  for (const auto& r : report.records) {
    const CellKey key{r.d, r.n, r.omega, r.alpha, r.rescale, r.seed, static_cast<int>(r.method), static_cast<int>(r.regime)};
    auto [it, inserted] = cells.try_emplace(key);
    auto& s = it->second;
    if (inserted) s = cell_summary(r.d, r.n, r.omega, r.alpha, r.rescale, r.seed, r.method, r.regime);
    ++s.count;
    s.mean_error += r.error;
    s.mean_bound += r.bound;
    if (r.bound < r.error) s.violation_rate += 1.0;
  }
  report.summaries.clear();
  std::map<AggregateKey, Aggregate> aggregates;
  for (auto& [key, s] : cells) {
    if (s.count > 0) {
      const double count = static_cast<double>(s.count);
      s.mean_error /= count;
      s.mean_bound /= count;
      s.violation_rate /= count;
    }
    report.summaries.push_back(s);
    const AggregateKey akey{s.d, s.n, s.omega, s.alpha, s.rescale, static_cast<int>(s.method), static_cast<int>(s.regime)};
    auto [it, inserted] = aggregates.try_emplace(akey);
    auto& a = it->second;
    if (inserted) a = Aggregate{s.d, s.n, s.omega, s.alpha, s.rescale, s.method, s.regime};
    if (s.failed || s.count == 0) {
      ++a.failed_seeds;
      continue;
    }
    ++a.seeds;
    a.mean_error += s.mean_error;
    a.mean_bound += s.mean_bound;
    a.violation_rate += s.violation_rate;
  }
  report.aggregates.clear();
  for (auto& [key, a] : aggregates) {
    if (a.seeds > 0) {
      const double seeds = static_cast<double>(a.seeds);
      a.mean_error /= seeds;
      a.mean_bound /= seeds;
      a.violation_rate /= seeds;
    }
    report.aggregates.push_back(a);
  }

  report.histogram.clear();
  report.hull_fractions.clear();
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const HullRecord*>> groups;
  for (const auto& h : report.hull_records) groups[{h.d, h.n}].push_back(&h);
  const std::size_t bins = config.histogram_bins;
  for (const auto& [key, members] : groups) {
    const auto [d, n] = key;
    const double top = std::sqrt(static_cast<double>(d));
    const double width = top / static_cast<double>(bins);
    HullFraction fraction{d, n};
    std::vector<HistogramBin> rows;
    for (std::size_t b = 0; b < bins; ++b) rows.push_back({d, n, b, b * width, (b + 1) * width, 0, 0});
    for (const auto* h : members) {
      auto b = static_cast<std::size_t>(h->norm / width);
      b = std::min(b, bins - 1);
      (h->inside ? rows[b].inside : rows[b].outside) += 1;
      ++fraction.count;
      if (h->inside) ++fraction.inside;
    }
    fraction.fraction = fraction.count > 0 ? static_cast<double>(fraction.inside) / fraction.count : 0.0;
    report.hull_fractions.push_back(fraction);
    report.histogram.insert(report.histogram.end(), rows.begin(), rows.end());
  }
}

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  StudyReport report;
  report.kind = config.kind;
  if (config.kind == StudyKind::extrapolation_hist) {
    run_hull_study(config, report);
  } else {
    run_method_study(config, report);
  }
  summarize(report, config);
  return report;
}

StudyReport variation_study(StudyConfig config) {
  config.kind = StudyKind::variation;
  return run_study(config);
}

StudyReport skew_study(StudyConfig config) {
  config.kind = StudyKind::skew;
  return run_study(config);
}

StudyReport extrapolation_histogram(StudyConfig config) {
  config.kind = StudyKind::extrapolation_hist;
  return run_study(config);
}

}  // namespace interpbound::harness
