#pragma once

// ReLU multilayer perceptron regressor trained with mini-batch Adam on mean
// squared error, with seeded restarts and validation-based selection.

#include <filesystem>
#include <string>
#include <vector>

#include "interpbound/dataset.hpp"

namespace interpbound::mlp {

struct Config {
  std::vector<int> hidden_layers{100, 100, 100};
  double learning_rate = 1e-3;
  std::size_t batch_size = 20;
  double validation_fraction = 0.1;
  double early_stop_threshold = 1e-6;
  std::size_t max_epochs = 500;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Learning rate 1e-8 and 100 restarts: tiny steps, many tries.
  static Config conservative();
  void validate() const;
};

struct Layer {
  Matrix weights;  // out x in
  Vector bias;
};

struct RestartSummary {
  std::size_t index = 0;
  double validation_mse = 0.0;
  std::size_t epochs = 0;
  bool diverged = false;
};

struct Model {
  std::vector<Layer> layers;
  /// Filled by train(); empty for hand-built or loaded models.
  std::vector<RestartSummary> restarts;
  std::size_t selected_restart = 0;
  double validation_mse = 0.0;

  Eigen::Index input_dimension() const { return layers.empty() ? 0 : layers.front().weights.cols(); }
  double predict(const Vector& q) const;
  /// One prediction per row of `points`.
  Vector predict_all(const Matrix& points) const;
  /// On/off state of every hidden unit at q, layer by layer.
  std::vector<bool> activation_pattern(const Vector& q) const;
};

/// All weights and biases zero; widths chain input -> hidden... -> 1.
Model zero_model(Eigen::Index input_dimension, const std::vector<int>& hidden_layers);

/// Seeded He-uniform hidden weights; zero output layer and biases.
Model initialized_model(Eigen::Index input_dimension, const std::vector<int>& hidden_layers, numkit::Rng& rng);

/// Parameters in layer order, each layer's weights row-major then its bias.
Vector flatten(const Model& model);
void unflatten(Model& model, const Vector& parameters);

/// Mean squared error over the rows of `points`; when `gradient` is given it
/// receives the flattened derivative by backpropagation.
double loss(const Model& model, const Matrix& points, const Vector& targets, Vector* gradient = nullptr);

/// Throws InvalidArgument when n < 10, NonFiniteLoss when every restart
/// diverges.
Model train(const Dataset& data, const Config& config = {});

std::string to_json(const Model& model);
Model from_json(const std::string& text);
void save(const Model& model, const std::filesystem::path& path);
Model load(const std::filesystem::path& path);

}  // namespace interpbound::mlp
