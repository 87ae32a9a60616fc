#include <cmath>

#include "doctest.h"
#include "interpbound/delaunay.hpp"
#include "interpbound/lipschitz.hpp"
#include "interpbound/synthetic.hpp"

using namespace interpbound;
using namespace interpbound::delaunay;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double value : v) x(i++) = value;
  return x;
}

geometry::SimplexLocation unit_triangle_location(Eigen::Index base) {
  geometry::SimplexLocation loc;
  loc.vertex_indices = {0, 1, 2};
  loc.weights = vec({1.0 / 3, 1.0 / 3, 1.0 / 3});
  loc.base_vertex_index = base;
  loc.located_point = vec({1.0 / 3, 1.0 / 3});
  loc.affine_dimension = 2;
  return loc;
}

Dataset unit_triangle(double (*f)(double, double)) {
  Matrix p(3, 2);
  p << 0, 0, 1, 0, 0, 1;
  Vector y(3);
  for (int i = 0; i < 3; ++i) y(i) = f(p(i, 0), p(i, 1));
  return Dataset(p, y);
}

Dataset random_affine(numkit::Rng& rng, int n, int d, Vector& a, double& b) {
  Matrix p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = rng.uniform(-1, 1);
  a.resize(d);
  for (int j = 0; j < d; ++j) a(j) = rng.normal();
  b = rng.normal();
  return Dataset(p, (p * a).array() + b);
}

}  // namespace

TEST_CASE("prediction for a small example") {
  Matrix p(4, 2);
  p << 0, 0, 2, 0, 0, 2, 1.2, 1.2;
  const Dataset data(p, vec({0, 1, 1, 2}));
  const auto pred = predict(vec({1.0, 0.5}), data);
  CHECK(pred.value == doctest::Approx(13.0 / 12.0).epsilon(1e-12));
  REQUIRE(pred.contributing.size() == 3);
  double sum = 0.0;
  for (const auto& c : pred.contributing) sum += c.weight * c.response;
  CHECK(std::abs(sum - pred.value) <= 1e-12);
}

TEST_CASE("local gamma") {
  const Dataset quadratic = unit_triangle([](double x, double y) { return x * x + y * y; });
  CHECK(local_gamma(unit_triangle_location(0), quadratic) == doctest::Approx(2.0 * std::sqrt(2.0)));
  const Dataset constant = unit_triangle([](double, double) { return 3.5; });
  CHECK(local_gamma(unit_triangle_location(0), constant) == 0.0);
}

TEST_CASE("bound parts for the quadratic triangle") {
  const Dataset data = unit_triangle([](double x, double y) { return x * x + y * y; });
  const auto parts = error_bound(unit_triangle_location(0), data, 0.0);
  CHECK(parts.gamma_hat == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(parts.sigma_hat == doctest::Approx(1.0));
  CHECK(parts.k == doctest::Approx(1.0));
  CHECK(parts.h == doctest::Approx(std::sqrt(2.0)));
  CHECK(parts.dimension == 2);
  CHECK(parts.residual == 0.0);
  CHECK(parts.bound_value == doctest::Approx(2.0 * std::sqrt(2.0) + 4.0));
  CHECK(std::abs(parts.recompute() - parts.bound_value) <= 1e-12 * parts.bound_value);

  // base vertex (1,0): k is the longest edge from it
  const auto other = error_bound(unit_triangle_location(1), data, 0.0);
  CHECK(other.k == doctest::Approx(std::sqrt(2.0)));

  BoundOptions global;
  global.global_h = 3.0;
  const auto g = error_bound(unit_triangle_location(0), data, 0.0, global);
  CHECK(g.h == 3.0);
}

TEST_CASE("constant responses give a zero interior bound") {
  numkit::Rng rng(2);
  Matrix p(30, 3);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 3; ++j) p(i, j) = rng.uniform(-1, 1);
  const Interpolant interp(Dataset(p, Vector::Constant(30, 2.0)));
  const auto pred = interp.predict(vec({0.1, 0.0, -0.1}));
  CHECK(pred.bound.bound_value == 0.0);
  CHECK(pred.value == doctest::Approx(2.0));
}

TEST_CASE("interpolation at training points") {
  synthetic::SyntheticSpec spec;
  spec.d = 3;
  spec.n = 64;
  spec.omega = 1.0;
  const Dataset data = synthetic::generate_dataset(spec);
  const Interpolant interp(data);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    CHECK(std::abs(interp.predict(data.point(i)).value - data.responses(i)) <= 1e-12);
  }
}

TEST_CASE("affine functions are reproduced inside the hull") {
  numkit::Rng rng(3);
  for (const int d : {2, 3, 5}) {
    Vector a;
    double b = 0;
    const Dataset data = random_affine(rng, 60, d, a, b);
    const Interpolant interp(data);
    for (int k = 0; k < 20; ++k) {
      Vector q(d);
      for (int j = 0; j < d; ++j) q(j) = rng.uniform(-0.3, 0.3);
      const auto pred = interp.predict(q);
      if (pred.location.was_projected) continue;
      CHECK(std::abs(pred.value - (a.dot(q) + b)) <= 1e-10);
    }
  }
}

TEST_CASE("prediction is continuous across a shared facet") {
  Matrix p(4, 2);
  p << 0, 0, 2, 0, 0, 2, 1.2, 1.2;
  const Dataset data(p, vec({0.3, 1.0, -1.0, 2.0}));
  // the diagonal from (0,0) to (1.2,1.2) is shared by two triangles
  for (const double t : {0.1, 0.4, 0.9}) {
    const Vector q = vec({1.2 * t, 1.2 * t});
    const double on = predict(q, data).value;
    const double left = predict(q + vec({-1e-10, 1e-10}), data).value;
    const double right = predict(q + vec({1e-10, -1e-10}), data).value;
    CHECK(std::abs(on - left) <= 1e-8);
    CHECK(std::abs(on - right) <= 1e-8);
  }
}

TEST_CASE("extrapolation adds the residual term") {
  Matrix p(4, 2);
  p << 0, 0, 1, 0, 0, 1, 1, 1;
  const Dataset data(p, vec({0, 1, 1, 2}));
  const Interpolant interp(data);
  const auto pred = interp.predict(vec({3.0, 0.5}));
  CHECK(pred.location.was_projected);
  CHECK(pred.bound.residual == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(pred.bound.lipschitz == doctest::Approx(lipschitz_estimate(data)));
  CHECK(pred.bound.bound_value >= pred.bound.lipschitz * pred.bound.residual);
  CHECK(pred.value == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(std::abs(pred.bound.recompute() - pred.bound.bound_value) <= 1e-12 * pred.bound.bound_value);
}

TEST_CASE("prediction is invariant under joint similarity transforms") {
  numkit::Rng rng(4);
  synthetic::SyntheticSpec spec;
  spec.d = 3;
  spec.n = 40;
  spec.omega = 0.5;
  const Dataset data = synthetic::generate_dataset(spec);
  const double scale = 7.5;
  const Vector shift = vec({1.0, -2.0, 0.5});
  const Matrix moved = (data.points * scale).rowwise() + shift.transpose();
  const Interpolant a(data), b(Dataset(moved, data.responses));
  for (int k = 0; k < 20; ++k) {
    const Vector q = vec({rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)});
    const auto pa = a.predict(q);
    const auto pb = b.predict(scale * q + shift);
    CHECK(pa.location.vertex_indices == pb.location.vertex_indices);
    CHECK(std::abs(pa.value - pb.value) <= 1e-9);
  }
}

TEST_CASE("bound is nonnegative and recomputable") {
  synthetic::SyntheticSpec spec;
  spec.d = 4;
  spec.n = 128;
  spec.omega = 1.0;
  const Dataset data = synthetic::generate_dataset(spec);
  const Interpolant interp(data);
  const Matrix queries = synthetic::sample_sphere(4, 0.5, 20, 1);
  for (int k = 0; k < 20; ++k) {
    const auto pred = interp.predict(queries.row(k).transpose());
    CHECK(pred.bound.bound_value >= 0.0);
    CHECK(pred.bound.gamma_hat >= 0.0);
    CHECK(std::abs(pred.bound.recompute() - pred.bound.bound_value) <= 1e-12 * (1.0 + pred.bound.bound_value));
  }
}

TEST_CASE("one-dimensional data") {
  Matrix p(5, 1);
  p << 0, 1, 2, 3, 4;
  Vector y(5);
  for (int i = 0; i < 5; ++i) y(i) = p(i, 0) * p(i, 0);
  const Interpolant interp(Dataset(p, y));
  const auto pred = interp.predict(vec({1.5}));
  CHECK(pred.value == doctest::Approx(2.5));
  // second divided difference of x^2 is 2 (derivative-scale 2 * 1)
  CHECK(pred.bound.gamma_hat == doctest::Approx(2.0));
  CHECK(pred.bound.h == doctest::Approx(1.0));
}

TEST_CASE("too few points is rejected") {
  Matrix p(2, 2);
  p << 0, 0, 1, 1;
  CHECK_THROWS_AS(Interpolant(Dataset(p, vec({0, 1}))), Error);
}
