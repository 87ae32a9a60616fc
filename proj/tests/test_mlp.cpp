#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "interpbound/mlp.hpp"
#include "interpbound/synthetic.hpp"

using namespace interpbound;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double value : v) x(i++) = value;
  return x;
}

Matrix random_points(numkit::Rng& rng, int n, int d) {
  Matrix p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = rng.uniform(-1, 1);
  return p;
}

mlp::Config small_config() {
  mlp::Config config;
  config.hidden_layers = {16, 16};
  config.max_epochs = 60;
  config.restarts = 3;
  config.seed = 5;
  return config;
}

}  // namespace

TEST_CASE("zero model predicts zero") {
  const auto model = mlp::zero_model(3, {4, 5});
  numkit::Rng rng(1);
  for (int k = 0; k < 10; ++k) CHECK(model.predict(random_points(rng, 1, 3).row(0).transpose()) == 0.0);
  CHECK(model.input_dimension() == 3);
  CHECK(mlp::flatten(model).size() == (4 * 3 + 4) + (5 * 4 + 5) + (1 * 5 + 1));
}

TEST_CASE("hand-computed forward pass") {
  auto model = mlp::zero_model(2, {1});
  model.layers[0].weights << 1.0, 2.0;
  model.layers[0].bias << -0.5;
  model.layers[1].weights << 3.0;
  model.layers[1].bias << 0.25;
  // relu(1*0.5 + 2*1 - 0.5) = 2, output 3*2 + 0.25
  CHECK(model.predict(vec({0.5, 1.0})) == doctest::Approx(6.25));
  // negative pre-activation: output is the bias
  CHECK(model.predict(vec({-1.0, -1.0})) == doctest::Approx(0.25));
}

TEST_CASE("flatten and unflatten are inverse") {
  numkit::Rng rng(2);
  auto model = mlp::initialized_model(3, {5, 4}, rng);
  const Vector theta = mlp::flatten(model);
  auto other = mlp::zero_model(3, {5, 4});
  mlp::unflatten(other, theta);
  CHECK(mlp::flatten(other) == theta);
  const Vector q = vec({0.1, -0.2, 0.3});
  CHECK(other.predict(q) == model.predict(q));
}

TEST_CASE("backpropagation matches central differences") {
  numkit::Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    auto model = mlp::initialized_model(3, {5, 5}, rng);
    // nonzero biases so that no unit sits exactly on its kink
    Vector theta = mlp::flatten(model);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += 0.05 * rng.normal();
    mlp::unflatten(model, theta);
    const Matrix x = random_points(rng, 20, 3);
    Vector y(20);
    for (int i = 0; i < 20; ++i) y(i) = std::sin(x(i, 0)) + x(i, 1) * x(i, 2);
    Vector gradient;
    mlp::loss(model, x, y, &gradient);
    REQUIRE(gradient.size() == theta.size());
    const double step = 1e-6;
    Vector numeric(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Vector plus = theta, minus = theta;
      plus(i) += step;
      minus(i) -= step;
      auto mp = model, mm = model;
      mlp::unflatten(mp, plus);
      mlp::unflatten(mm, minus);
      numeric(i) = (mlp::loss(mp, x, y) - mlp::loss(mm, x, y)) / (2.0 * step);
    }
    CHECK((gradient - numeric).norm() <= 1e-5 * std::max(1.0, numeric.norm()));
  }
}

TEST_CASE("piecewise linear along segments with a fixed activation pattern") {
  numkit::Rng rng(4);
  auto model = mlp::initialized_model(2, {8, 8}, rng);
  Vector theta = mlp::flatten(model);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += 0.3 * rng.normal();
  mlp::unflatten(model, theta);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 20; ++trial) {
    const Vector a = random_points(rng, 1, 2).row(0).transpose();
    const Vector b = a + 0.05 * random_points(rng, 1, 2).row(0).transpose();
    const auto pattern = model.activation_pattern(a);
    bool same = model.activation_pattern(b) == pattern;
    for (int k = 1; k <= 5 && same; ++k) same = model.activation_pattern(a + (b - a) * (k / 6.0)) == pattern;
    if (!same) continue;
    const double fa = model.predict(a), fb = model.predict(b);
    for (int k = 1; k <= 5; ++k) {
      const double t = k / 6.0;
      CHECK(std::abs(model.predict(a + (b - a) * t) - ((1 - t) * fa + t * fb)) <= 1e-8);
    }
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("constant zero responses stop early") {
  numkit::Rng rng(5);
  const Dataset data(random_points(rng, 100, 2), Vector::Zero(100));
  auto config = small_config();
  config.max_epochs = 500;
  const auto model = mlp::train(data, config);
  CHECK(model.validation_mse < 1e-6);
  for (const auto& r : model.restarts) CHECK(r.epochs < 5);
}

TEST_CASE("training is deterministic and selects the best restart") {
  synthetic::SyntheticSpec spec;
  spec.d = 2;
  spec.n = 200;
  const Dataset data = synthetic::generate_dataset(spec);
  const auto a = mlp::train(data, small_config());
  const auto b = mlp::train(data, small_config());
  CHECK(mlp::flatten(a) == mlp::flatten(b));
  REQUIRE(a.restarts.size() == 3);
  for (const auto& r : a.restarts) {
    CHECK(std::isfinite(r.validation_mse));
    CHECK(a.validation_mse <= r.validation_mse);
  }
  CHECK(a.restarts[a.selected_restart].validation_mse == a.validation_mse);
}

TEST_CASE("model JSON round trip") {
  synthetic::SyntheticSpec spec;
  spec.d = 3;
  spec.n = 50;
  const Dataset data = synthetic::generate_dataset(spec);
  auto config = small_config();
  config.max_epochs = 5;
  const auto model = mlp::train(data, config);
  const auto back = mlp::from_json(mlp::to_json(model));
  CHECK(mlp::flatten(back) == mlp::flatten(model));
  const auto path = std::filesystem::temp_directory_path() / "interpbound_mlp.json";
  mlp::save(model, path);
  const auto loaded = mlp::load(path);
  CHECK(mlp::flatten(loaded) == mlp::flatten(model));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(mlp::from_json("{\"layers\": 3}"), Error);
}

TEST_CASE("config validation") {
  auto config = small_config();
  config.learning_rate = -1.0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = small_config();
  config.restarts = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  const auto slow = mlp::Config::conservative();
  CHECK(slow.learning_rate == 1e-8);
  CHECK(slow.restarts == 100);
  Matrix few(5, 1);
  few << 0, 1, 2, 3, 4;
  CHECK_THROWS_AS(mlp::train(Dataset(few, Vector::Zero(5)), small_config()), Error);
}
