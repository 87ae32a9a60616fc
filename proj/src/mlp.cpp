#include "interpbound/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace interpbound::mlp {

Config Config::conservative() {
  Config config;
  config.learning_rate = 1e-8;
  config.restarts = 100;
  return config;
}

void Config::validate() const {
  for (const int width : hidden_layers) {
    if (width < 1) throw Error(ErrorCode::InvalidArgument, "hidden layer widths must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "validation fraction must lie in (0, 1)");
  }
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one restart");
}

namespace {

std::vector<Eigen::Index> widths_of(Eigen::Index input_dimension, const std::vector<int>& hidden_layers) {
  std::vector<Eigen::Index> widths{input_dimension};
  for (const int w : hidden_layers) widths.push_back(w);
  widths.push_back(1);
  return widths;
}

std::vector<Layer> zero_layers_like(const std::vector<Layer>& layers) {
  std::vector<Layer> zeros;
  for (const auto& layer : layers) {
    zeros.push_back({Matrix::Zero(layer.weights.rows(), layer.weights.cols()), Vector::Zero(layer.bias.size())});
  }
  return zeros;
}

// Columns of `inputs` are samples. Fills pre-activations per layer and
// returns the output row.
Eigen::RowVectorXd forward(const std::vector<Layer>& layers, const Matrix& inputs, std::vector<Matrix>* pre,
                           std::vector<Matrix>* post) {
  Matrix activation = inputs;
  if (post) post->push_back(activation);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = layers[l].weights * activation;
    z.colwise() += layers[l].bias;
    if (pre) pre->push_back(z);
    if (l + 1 < layers.size()) {
      activation = z.cwiseMax(0.0);
      if (post) post->push_back(activation);
    } else {
      activation = std::move(z);
    }
  }
  return activation.row(0);
}

double backprop(const std::vector<Layer>& layers, const Matrix& inputs, const Vector& targets,
                std::vector<Layer>* gradients) {
  std::vector<Matrix> pre;
  std::vector<Matrix> post;
  const Eigen::RowVectorXd output = forward(layers, inputs, gradients ? &pre : nullptr, gradients ? &post : nullptr);
  const Eigen::RowVectorXd error = output - targets.transpose();
  const double count = static_cast<double>(targets.size());
  const double mse = error.squaredNorm() / count;
  if (!gradients) return mse;
  Matrix delta = (2.0 / count) * error;
  for (std::size_t l = layers.size(); l-- > 0;) {
    (*gradients)[l].weights.noalias() = delta * post[l].transpose();
    (*gradients)[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Matrix back = layers[l].weights.transpose() * delta;
    delta = back.array() * (pre[l - 1].array() > 0.0).cast<double>();
  }
  return mse;
}

Matrix gather_columns(const Matrix& points_t, const std::vector<Eigen::Index>& rows, std::size_t begin,
                      std::size_t end) {
  Matrix out(points_t.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t k = begin; k < end; ++k) out.col(static_cast<Eigen::Index>(k - begin)) = points_t.col(rows[k]);
  return out;
}

Vector gather(const Vector& values, const std::vector<Eigen::Index>& rows, std::size_t begin, std::size_t end) {
  Vector out(static_cast<Eigen::Index>(end - begin));
  for (std::size_t k = begin; k < end; ++k) out(static_cast<Eigen::Index>(k - begin)) = values(rows[k]);
  return out;
}

}  // namespace

double Model::predict(const Vector& q) const {
  if (q.size() != input_dimension()) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from model");
  return forward(layers, q, nullptr, nullptr)(0);
}

Vector Model::predict_all(const Matrix& points) const {
  if (points.cols() != input_dimension()) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from model");
  return forward(layers, points.transpose(), nullptr, nullptr).transpose();
}

std::vector<bool> Model::activation_pattern(const Vector& q) const {
  std::vector<Matrix> pre;
  forward(layers, q, &pre, nullptr);
  std::vector<bool> pattern;
  for (std::size_t l = 0; l + 1 < pre.size(); ++l) {
    for (Eigen::Index i = 0; i < pre[l].rows(); ++i) pattern.push_back(pre[l](i, 0) > 0.0);
  }
  return pattern;
}

Model zero_model(Eigen::Index input_dimension, const std::vector<int>& hidden_layers) {
  const auto widths = widths_of(input_dimension, hidden_layers);
  Model model;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    model.layers.push_back({Matrix::Zero(widths[l + 1], widths[l]), Vector::Zero(widths[l + 1])});
  }
  return model;
}

Model initialized_model(Eigen::Index input_dimension, const std::vector<int>& hidden_layers, numkit::Rng& rng) {
  Model model = zero_model(input_dimension, hidden_layers);
  // the linear output layer starts at zero, so every restart begins from the
  // zero function
  for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.cols()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = rng.uniform(-limit, limit);
    }
  }
  return model;
}

Vector flatten(const Model& model) {
  Eigen::Index total = 0;
  for (const auto& layer : model.layers) total += layer.weights.size() + layer.bias.size();
  Vector parameters(total);
  Eigen::Index at = 0;
  for (const auto& layer : model.layers) {
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) parameters(at++) = layer.weights(i, j);
    }
    parameters.segment(at, layer.bias.size()) = layer.bias;
    at += layer.bias.size();
  }
  return parameters;
}

void unflatten(Model& model, const Vector& parameters) {
  Eigen::Index at = 0;
  for (auto& layer : model.layers) {
    if (at + layer.weights.size() + layer.bias.size() > parameters.size()) {
      throw Error(ErrorCode::DimensionMismatch, "parameter vector is too short for the model");
    }
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = parameters(at++);
    }
    layer.bias = parameters.segment(at, layer.bias.size());
    at += layer.bias.size();
  }
  if (at != parameters.size()) throw Error(ErrorCode::DimensionMismatch, "parameter vector is too long for the model");
}

double loss(const Model& model, const Matrix& points, const Vector& targets, Vector* gradient) {
  if (points.rows() != targets.size()) throw Error(ErrorCode::DimensionMismatch, "point and target counts differ");
  if (!gradient) return backprop(model.layers, points.transpose(), targets, nullptr);
  Model grads;
  grads.layers = zero_layers_like(model.layers);
  const double value = backprop(model.layers, points.transpose(), targets, &grads.layers);
  *gradient = flatten(grads);
  return value;
}

Model train(const Dataset& data, const Config& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(data.size());
  if (n < 10) throw Error(ErrorCode::InvalidArgument, "MLP training needs at least 10 points");
  const auto validation_count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(n))), 1, n - 1);
  const Matrix points_t = data.points.transpose();

  std::vector<RestartSummary> summaries;
  std::optional<Model> best;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    numkit::Rng rng(config.seed, r);
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    const Matrix validation_x = gather_columns(points_t, order, 0, validation_count);
    const Vector validation_y = gather(data.responses, order, 0, validation_count);
    std::vector<Eigen::Index> training(order.begin() + static_cast<std::ptrdiff_t>(validation_count), order.end());

    Model model = initialized_model(data.dimension(), config.hidden_layers, rng);
    auto grads = zero_layers_like(model.layers);
    auto first_moment = zero_layers_like(model.layers);
    auto second_moment = zero_layers_like(model.layers);
    double beta1_power = 1.0;
    double beta2_power = 1.0;

    RestartSummary summary;
    summary.index = r;
    summary.validation_mse = std::numeric_limits<double>::infinity();
    std::vector<Layer> best_layers = model.layers;
    summary.validation_mse = backprop(model.layers, validation_x, validation_y, nullptr);
    const bool converged_at_start = summary.validation_mse < config.early_stop_threshold;
    for (std::size_t epoch = 0; epoch < config.max_epochs && !converged_at_start; ++epoch) {
      std::shuffle(training.begin(), training.end(), rng.engine());
      for (std::size_t begin = 0; begin < training.size(); begin += config.batch_size) {
        const std::size_t end = std::min(begin + config.batch_size, training.size());
        const double batch_loss = backprop(model.layers, gather_columns(points_t, training, begin, end),
                                           gather(data.responses, training, begin, end), &grads);
        if (!std::isfinite(batch_loss)) {
          summary.diverged = true;
          break;
        }
        beta1_power *= config.beta1;
        beta2_power *= config.beta2;
        const double step = config.learning_rate * std::sqrt(1.0 - beta2_power) / (1.0 - beta1_power);
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
          auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseAbs2();
            param.array() -= step * m.array() / (v.array().sqrt() + config.epsilon);
          };
          update(model.layers[l].weights, grads[l].weights, first_moment[l].weights, second_moment[l].weights);
          update(model.layers[l].bias, grads[l].bias, first_moment[l].bias, second_moment[l].bias);
        }
      }
      if (summary.diverged) break;
      summary.epochs = epoch + 1;
      const double validation = backprop(model.layers, validation_x, validation_y, nullptr);
      if (!std::isfinite(validation)) {
        summary.diverged = true;
        break;
      }
      if (validation < summary.validation_mse) {
        summary.validation_mse = validation;
        best_layers = model.layers;
      }
      if (validation < config.early_stop_threshold) break;
    }
    summaries.push_back(summary);
    if (summary.diverged) continue;
    if (!best || summary.validation_mse < best->validation_mse) {
      best = Model{};
      best->layers = std::move(best_layers);
      best->validation_mse = summary.validation_mse;
      best->selected_restart = r;
    }
  }
  if (!best) throw Error(ErrorCode::NonFiniteLoss, "every training restart diverged");
  best->restarts = std::move(summaries);
  return *best;
}

std::string to_json(const Model& model) {
  nlohmann::json doc;
  doc["layers"] = nlohmann::json::array();
  for (const auto& layer : model.layers) {
    nlohmann::json entry;
    entry["rows"] = layer.weights.rows();
    entry["cols"] = layer.weights.cols();
    std::vector<double> weights;
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) weights.push_back(layer.weights(i, j));
    }
    entry["weights"] = weights;
    entry["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    doc["layers"].push_back(entry);
  }
  return doc.dump(2);
}

Model from_json(const std::string& text) {
  Model model;
  try {
    const auto doc = nlohmann::json::parse(text);
    Eigen::Index previous = -1;
    for (const auto& entry : doc.at("layers")) {
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      const auto weights = entry.at("weights").get<std::vector<double>>();
      const auto bias = entry.at("bias").get<std::vector<double>>();
      if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(weights.size()) != rows * cols ||
          static_cast<Eigen::Index>(bias.size()) != rows || (previous >= 0 && previous != cols)) {
        throw Error(ErrorCode::DimensionMismatch, "layer shapes do not chain");
      }
      Layer layer{Matrix(rows, cols), Eigen::Map<const Vector>(bias.data(), rows)};
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) layer.weights(i, j) = weights[static_cast<std::size_t>(i * cols + j)];
      }
      model.layers.push_back(std::move(layer));
      previous = rows;
    }
    if (model.layers.empty() || previous != 1) throw Error(ErrorCode::DimensionMismatch, "model must end in one output");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("invalid model JSON: ") + e.what());
  }
  return model;
}

void save(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json(model) << '\n';
}

Model load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace interpbound::mlp
