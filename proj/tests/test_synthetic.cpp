#include <cmath>
#include <numbers>

#include "doctest.h"
#include "interpbound/synthetic.hpp"

using namespace interpbound;
using namespace interpbound::synthetic;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double value : v) x(i++) = value;
  return x;
}

}  // namespace

TEST_CASE("response function values") {
  for (const double omega : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(response_function(vec({0.5, 0.5, 0.5}), omega) == doctest::Approx(-0.5));
  }
  CHECK(response_function(vec({1.5}), 0.0) == doctest::Approx(0.0));
  CHECK(response_function(vec({1.0, 0.5}), 1.0) == doctest::Approx(0.5625));
}

TEST_CASE("response function is bounded") {
  numkit::Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(8));
    Vector x(d);
    double max_z2 = 0.0;
    for (int j = 0; j < d; ++j) {
      x(j) = rng.uniform(-3, 3);
      max_z2 = std::max(max_z2, (x(j) - 0.5) * (x(j) - 0.5));
    }
    CHECK(std::abs(response_function(x, rng.uniform(0, 3))) <= 0.5 * (max_z2 + 1.0) + 1e-15);
  }
}

TEST_CASE("smooth response is midpoint convex") {
  numkit::Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    Vector a(4), b(4);
    for (int j = 0; j < 4; ++j) a(j) = rng.uniform(-1, 1), b(j) = rng.uniform(-1, 1);
    const Vector m = 0.5 * (a + b);
    CHECK(response_function(m, 0.0) <= 0.5 * (response_function(a, 0.0) + response_function(b, 0.0)) + 1e-15);
  }
}

TEST_CASE("one-dimensional slice has two full cosine periods") {
  // cos(2 pi z) on z in [-1.5, 0.5], i.e. x in [-1, 1].
  int crossings = 0;
  const int steps = 20001;
  double previous = std::cos(2.0 * std::numbers::pi * -1.5 + 1e-9);
  for (int i = 1; i < steps; ++i) {
    const double z = -1.5 + 2.0 * i / (steps - 1) - (i == steps - 1 ? 1e-9 : 0.0);
    const double value = std::cos(2.0 * std::numbers::pi * z);
    if ((value > 0) != (previous > 0)) ++crossings;
    previous = value;
  }
  CHECK(crossings == 4);
}

TEST_CASE("skew") {
  Matrix p(1, 2);
  p << 1, 1;
  const Matrix s = apply_skew(p, 3.0);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(s(0, 1) == doctest::Approx(0.367879).epsilon(1e-6));

  numkit::Rng rng(3);
  Matrix q(10, 5);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) q(i, j) = rng.uniform(-1, 1);
  CHECK(apply_skew(q, 0.0) == q);
  const Matrix sq = apply_skew(q, 7.0);
  CHECK(sq.col(0) == q.col(0));
  CHECK((apply_skew(Matrix(2.5 * q), 7.0) - 2.5 * sq).norm() < 1e-14);
  const Vector row = q.row(3).transpose();
  CHECK((apply_skew(row, 7.0) - sq.row(3).transpose()).norm() == 0.0);
}

TEST_CASE("generated responses are the response function at skewed points") {
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 4;
  spec.spacing = numkit::SamplingMethod::uniform;
  spec.seed = 1;
  const Dataset data = generate_dataset(spec);
  CHECK(data.size() == 4);
  CHECK(data.points.minCoeff() >= -1.0);
  CHECK(data.points.maxCoeff() <= 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(data.responses(i) == response_function(data.point(i), 0.0));

  spec.d = 5;
  spec.n = 64;
  spec.spacing = numkit::SamplingMethod::sobol;
  spec.alpha = 10.0;
  spec.omega = 1.0;
  const Dataset skewed = generate_dataset(spec);
  const double limit = std::exp(-40.0 / 6.0);
  CHECK(skewed.points.col(4).cwiseAbs().maxCoeff() <= limit);
  for (Eigen::Index i = 0; i < skewed.size(); ++i) {
    CHECK(skewed.responses(i) == response_function(skewed.point(i), 1.0));
  }
  spec.alpha = 0.0;
  const Dataset raw = generate_dataset(spec);
  CHECK((apply_skew(raw.points, 10.0) - skewed.points).norm() == 0.0);

  spec.alpha = 10.0;
  spec.evaluate_before_skew = true;
  const Dataset before = generate_dataset(spec);
  CHECK(before.points == skewed.points);
  for (Eigen::Index i = 0; i < before.size(); ++i) CHECK(before.responses(i) == raw.responses(i));
}

TEST_CASE("generation is deterministic") {
  SyntheticSpec spec;
  spec.d = 3;
  spec.n = 50;
  spec.seed = 12;
  spec.omega = 0.7;
  for (const auto method :
       {numkit::SamplingMethod::sobol, numkit::SamplingMethod::latin_hypercube, numkit::SamplingMethod::uniform}) {
    spec.spacing = method;
    const Dataset a = generate_dataset(spec);
    const Dataset b = generate_dataset(spec);
    CHECK(a.points == b.points);
    CHECK(a.responses == b.responses);
  }
}

TEST_CASE("sphere samples") {
  for (const double r : {0.1, 2.0}) {
    const Matrix p = sample_sphere(5, r, 10, 4);
    CHECK(p.rows() == 10);
    CHECK(p.cols() == 5);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(p.row(i).norm() - r) <= 1e-12);
    CHECK(p == sample_sphere(5, r, 10, 4));
  }
  CHECK(sample_sphere(5, 1.0, 10, 4) != sample_sphere(5, 1.0, 10, 5));
}
