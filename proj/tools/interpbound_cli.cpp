// interpbound command line: data generation, prediction with error bounds,
// empirical studies and held-out validation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "interpbound/dataset.hpp"
#include "interpbound/error.hpp"
#include "interpbound/methods.hpp"
#include "interpbound/mlp.hpp"
#include "interpbound/report.hpp"
#include "interpbound/study.hpp"
#include "interpbound/synthetic.hpp"
#include "interpbound/validation.hpp"

namespace ib = interpbound;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ib::Error(ib::ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct GenArgs {
  std::size_t d = 2;
  std::size_t n = 16;
  std::string spacing = "sobol";
  std::uint64_t seed = 0;
  double omega = 0.0;
  double alpha = 0.0;
  bool evaluate_before_skew = false;
  std::string out;
};

void run_gen(const GenArgs& args) {
  ib::synthetic::SyntheticSpec spec;
  spec.d = args.d;
  spec.n = args.n;
  spec.spacing = ib::numkit::parse_sampling_method(args.spacing);
  spec.seed = args.seed;
  spec.omega = args.omega;
  spec.alpha = args.alpha;
  spec.evaluate_before_skew = args.evaluate_before_skew;
  if (spec.d == 0 || spec.n == 0) throw ib::Error(ib::ErrorCode::InvalidArgument, "d and n must be positive");
  if (!(spec.omega >= 0.0) || !(spec.alpha >= 0.0)) {
    throw ib::Error(ib::ErrorCode::InvalidArgument, "omega and alpha must be non-negative");
  }
  ib::save_csv(ib::synthetic::generate_dataset(spec), args.out);
}

struct PredictArgs {
  std::string method;
  std::string train;
  std::string query;
  std::string out;
  bool no_rescale = false;
  std::uint64_t seed = 0;
  std::size_t fill_samples = 10000;
};

void run_predict(const PredictArgs& args) {
  const auto method = ib::harness::parse_method(args.method);
  const ib::Dataset train = ib::load_csv(args.train);
  const ib::QueryTable queries = ib::load_query_csv(args.query);
  if (queries.points.cols() != train.points.cols()) {
    throw ib::Error(ib::ErrorCode::DimensionMismatch, "query file has d = " + std::to_string(queries.points.cols()) +
                                                          ", training file has d = " +
                                                          std::to_string(train.points.cols()));
  }
  const auto rescaler = args.no_rescale ? ib::Rescaler::identity(train.dimension()) : ib::fit_rescaler(train);
  const ib::Dataset model_train = ib::apply_rescaler(rescaler, train, ib::Direction::forward);

  ib::harness::MethodOptions options;
  options.seed = args.seed;
  options.fill_samples = args.fill_samples;
  options.mlp.seed = args.seed;
  const auto fitted = ib::harness::fit_method(method, model_train, options);

  fs::create_directories(args.out);
  std::ostringstream csv;
  const auto d = queries.points.cols();
  for (Eigen::Index j = 0; j < d; ++j) csv << 'x' << (j + 1) << ',';
  csv << "prediction,bound";
  if (queries.has_responses) csv << ",true_value,error";
  csv << ",was_projected,residual";
  bool header_done = false;
  std::ostringstream rows;
  for (Eigen::Index i = 0; i < queries.points.rows(); ++i) {
    const ib::Vector x = queries.points.row(i).transpose();
    const auto p = fitted->predict(rescaler.forward_point(x));
    if (!header_done) {
      for (const auto& [name, value] : p.parts) csv << ',' << name;
      if (method == ib::harness::Method::delaunay) csv << ",vertices";
      csv << '\n';
      header_done = true;
    }
    for (Eigen::Index j = 0; j < d; ++j) rows << ib::format_real(x(j)) << ',';
    const double value = rescaler.inverse_value(p.value);
    rows << ib::format_real(value) << ',' << ib::format_real(p.bound * rescaler.output_scale);
    if (queries.has_responses) {
      rows << ',' << ib::format_real(queries.responses(i)) << ','
           << ib::format_real(std::abs(value - queries.responses(i)));
    }
    rows << ',' << (p.was_projected ? 1 : 0) << ',' << ib::format_real(p.residual);
    for (const auto& part : p.parts) rows << ',' << ib::format_real(part.second);
    if (method == ib::harness::Method::delaunay) {
      rows << ',';
      for (std::size_t k = 0; k < p.attribution.size(); ++k) {
        rows << (k ? ";" : "") << p.attribution[k].index << ':' << ib::format_real(p.attribution[k].weight);
      }
    }
    rows << '\n';
  }
  if (!header_done) csv << '\n';
  ib::harness::write_text(fs::path(args.out) / "predictions.csv", csv.str() + rows.str());
}

struct StudyArgs {
  std::string kind;
  std::string config;
  std::string out;
  std::string formats = "csv,json,svg";
};

void run_study(const StudyArgs& args) {
  const auto kind = ib::harness::parse_study_kind(args.kind);
  const auto formats = ib::harness::parse_formats(args.formats);
  const auto config = args.config.empty() ? ib::harness::StudyConfig::defaults(kind)
                                          : ib::harness::StudyConfig::from_json(read_file(args.config), kind);
  config.validate();
  const auto report = ib::harness::run_study(config);
  ib::harness::emit_report(report, config, formats, args.out);
}

struct ValidateArgs {
  std::string train;
  std::string eval;
  std::string methods = "delaunay,tps,gp";
  std::string out;
  double shift = 0.0;
  bool no_rescale = false;
  std::uint64_t seed = 0;
  std::string formats = "csv,json,svg";
};

void run_validate(const ValidateArgs& args) {
  ib::harness::ValidationOptions options;
  options.methods = ib::harness::parse_method_list(args.methods);
  options.shift = args.shift;
  options.rescale = !args.no_rescale;
  options.seed = args.seed;
  options.mlp.seed = args.seed;
  if (!(options.shift >= 0.0)) throw ib::Error(ib::ErrorCode::InvalidArgument, "shift must be non-negative");
  const auto formats = ib::harness::parse_formats(args.formats);
  const auto report = ib::harness::latent_validation(ib::load_csv(args.train), ib::load_csv(args.eval), options);
  ib::harness::emit_report(report, formats, args.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpolation with computable error bounds"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic benchmark dataset");
  gen_cmd->add_option("--d", gen.d, "Dimension")->required();
  gen_cmd->add_option("--n", gen.n, "Number of points")->required();
  gen_cmd->add_option("--spacing", gen.spacing, "sobol, lhs or uniform")
      ->check(CLI::IsMember({"sobol", "lhs", "latin_hypercube", "uniform"}));
  gen_cmd->add_option("--seed", gen.seed, "Sampler seed");
  gen_cmd->add_option("--omega", gen.omega, "Response variation");
  gen_cmd->add_option("--alpha", gen.alpha, "Coordinate skew");
  gen_cmd->add_flag("--evaluate-before-skew", gen.evaluate_before_skew, "Evaluate f at the unskewed samples");
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Fit one method and predict with error bounds");
  predict_cmd->add_option("--method", predict.method, "delaunay, tps, gp or mlp")
      ->required()
      ->check(CLI::IsMember({"delaunay", "tps", "gp", "mlp"}));
  predict_cmd->add_option("--train", predict.train, "Training CSV")->required();
  predict_cmd->add_option("--query", predict.query, "Query CSV (y column optional)")->required();
  predict_cmd->add_option("--out", predict.out, "Output directory")->required();
  predict_cmd->add_flag("--no-rescale", predict.no_rescale, "Fit in data coordinates");
  predict_cmd->add_option("--seed", predict.seed, "Seed for randomized components");
  predict_cmd->add_option("--fill-samples", predict.fill_samples, "Monte Carlo samples for the TPS fill distance");

  StudyArgs study;
  auto* study_cmd = app.add_subcommand("study", "Run an empirical study");
  study_cmd->add_option("kind", study.kind, "variation, skew or extrap")
      ->required()
      ->check(CLI::IsMember({"variation", "skew", "extrap", "extrapolation_hist"}));
  study_cmd->add_option("--config", study.config, "Study config JSON (kind defaults if omitted)");
  study_cmd->add_option("--out", study.out, "Output directory")->required();
  study_cmd->add_option("--formats", study.formats, "Comma list of csv, json, svg");

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Validate methods on held-out data");
  validate_cmd->add_option("--train", validate.train, "Training CSV")->required();
  validate_cmd->add_option("--eval", validate.eval, "Evaluation CSV")->required();
  validate_cmd->add_option("--methods", validate.methods, "Comma list of methods");
  validate_cmd->add_option("--out", validate.out, "Output directory")->required();
  validate_cmd->add_option("--shift", validate.shift, "Constant added to bounds for the shifted violation rate");
  validate_cmd->add_flag("--no-rescale", validate.no_rescale, "Fit in data coordinates");
  validate_cmd->add_option("--seed", validate.seed, "Seed for randomized components");
  validate_cmd->add_option("--formats", validate.formats, "Comma list of csv, json, svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    else if (*predict_cmd) run_predict(predict);
    else if (*study_cmd) run_study(study);
    else if (*validate_cmd) run_validate(validate);
  } catch (const ib::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ib::is_data_error(e.code()) ? kExitData : kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
