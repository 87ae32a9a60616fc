#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "interpbound/geometry.hpp"
#include "oracles.hpp"

using namespace interpbound;
using namespace interpbound::geometry;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double value : v) x(i++) = value;
  return x;
}

Dataset square() {
  Matrix p(4, 2);
  p << 0, 0, 1, 0, 0, 1, 1, 1;
  return Dataset(p, Vector::Zero(4));
}

Matrix random_points(numkit::Rng& rng, int n, int d) {
  Matrix p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = rng.uniform(-1, 1);
  return p;
}

void check_hull_weights(const HullQueryResult& r, const Matrix& points) {
  double total = 0.0;
  Vector z = Vector::Zero(points.cols());
  for (const auto& w : r.hull_weights) {
    CHECK(w.weight >= -1e-9);
    total += w.weight;
    z += w.weight * points.row(w.index).transpose();
  }
  CHECK(std::abs(total - 1.0) <= 1e-9);
  CHECK((z - r.projected_point).norm() <= 1e-8);
}

void check_location(const SimplexLocation& loc, const Matrix& points) {
  CHECK(std::abs(loc.weights.sum() - 1.0) <= 1e-9);
  CHECK(loc.weights.minCoeff() >= -1e-9);
  Vector z = Vector::Zero(points.cols());
  for (std::size_t j = 0; j < loc.vertex_indices.size(); ++j) {
    z += loc.weights(static_cast<Eigen::Index>(j)) * points.row(loc.vertex_indices[j]).transpose();
  }
  CHECK((z - loc.located_point).norm() <= 1e-8);
  CHECK(std::is_sorted(loc.vertex_indices.begin(), loc.vertex_indices.end()));
  CHECK(std::find(loc.vertex_indices.begin(), loc.vertex_indices.end(), loc.base_vertex_index) !=
        loc.vertex_indices.end());
}

}  // namespace

TEST_CASE("hull side on the unit square") {
  const Dataset data = square();
  CHECK(hull_side(vec({0.5, 0.5}), data).inside);
  CHECK_FALSE(hull_side(vec({2.0, 0.0}), data).inside);
  CHECK(hull_side(vec({1.0, 0.5}), data).inside);
  CHECK(hull_side(vec({0.0, 0.0}), data).inside);
  CHECK_FALSE(hull_side(vec({1.0 + 1e-6, 0.5}), data).inside);
}

TEST_CASE("hull side on collinear data") {
  Matrix p(2, 2);
  p << 0, 0, 1, 1;
  const Dataset data(p, Vector::Zero(2));
  CHECK(hull_side(vec({0.5, 0.5}), data).inside);
  CHECK_FALSE(hull_side(vec({0.5, 0.6}), data).inside);
  CHECK_FALSE(hull_side(vec({1.5, 1.5}), data).inside);
}

TEST_CASE("projection onto the unit square") {
  const Dataset data = square();
  auto r = project_to_hull(vec({2.0, 0.5}), data);
  CHECK_FALSE(r.inside);
  CHECK(r.converged);
  CHECK((r.projected_point - vec({1.0, 0.5})).norm() < 1e-8);
  CHECK(r.residual == doctest::Approx(1.0).epsilon(1e-8));
  check_hull_weights(r, data.points);

  r = project_to_hull(vec({2.0, 2.0}), data);
  CHECK((r.projected_point - vec({1.0, 1.0})).norm() < 1e-8);
  CHECK(r.residual == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));

  r = project_to_hull(vec({0.3, 0.6}), data);
  CHECK(r.inside);
  CHECK(r.residual == 0.0);
  CHECK((r.projected_point - vec({0.3, 0.6})).norm() == 0.0);
  check_hull_weights(r, data.points);
}

TEST_CASE("projection satisfies first-order optimality") {
  numkit::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    const Matrix p = random_points(rng, 30, d);
    const HullLocator locator(p);
    Vector q(d);
    for (int j = 0; j < d; ++j) q(j) = rng.normal();
    q *= 3.0 / q.norm();
    const auto r = locator.project(q);
    REQUIRE_FALSE(r.inside);
    CHECK(r.converged);
    check_hull_weights(r, p);
    CHECK(r.residual == doctest::Approx((q - r.projected_point).norm()));
    for (int i = 0; i < p.rows(); ++i) {
      CHECK((q - r.projected_point).dot(p.row(i).transpose() - r.projected_point) <= 1e-6);
    }
  }
}

TEST_CASE("hull membership agrees with brute force") {
  numkit::Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 2;
    const Matrix p = random_points(rng, 8 + trial % 5, d);
    const HullLocator locator(p);
    for (int k = 0; k < 10; ++k) {
      Vector q(d);
      for (int j = 0; j < d; ++j) q(j) = rng.uniform(-1.2, 1.2);
      const bool brute = oracle::in_hull_brute_force(p, q);
      // skip near-boundary cases where the two tolerances may disagree
      if (brute != oracle::in_hull_brute_force(p, q, -1e-7) || brute != oracle::in_hull_brute_force(p, q, 1e-7)) {
        continue;
      }
      CHECK(locator.side(q).inside == brute);
      CHECK(locator.project(q).inside == brute);
      CHECK(locator.locate(q).was_projected == !brute);
    }
  }
}

TEST_CASE("located simplex for a small example") {
  Matrix p(4, 2);
  p << 0, 0, 2, 0, 0, 2, 1.2, 1.2;
  const Dataset data(p, Vector::Zero(4));
  const auto loc = delaunay_locate(vec({1.0, 0.5}), data);
  REQUIRE(loc.vertex_indices == std::vector<Eigen::Index>{0, 1, 3});
  CHECK(loc.weights(0) == doctest::Approx(1.0 / 3.0));
  CHECK(loc.weights(1) == doctest::Approx(0.25));
  CHECK(loc.weights(2) == doctest::Approx(5.0 / 12.0));
  CHECK_FALSE(loc.was_projected);
  CHECK(loc.residual == 0.0);
  CHECK(loc.affine_dimension == 2);
  check_location(loc, p);
}

TEST_CASE("vertex and centroid queries") {
  numkit::Rng rng(6);
  const Matrix p = random_points(rng, 25, 3);
  const HullLocator locator(p);
  for (int i = 0; i < p.rows(); ++i) {
    const auto loc = locator.locate(p.row(i).transpose());
    check_location(loc, p);
    for (std::size_t j = 0; j < loc.vertex_indices.size(); ++j) {
      const double expected = loc.vertex_indices[j] == i ? 1.0 : 0.0;
      CHECK(std::abs(loc.weights(static_cast<Eigen::Index>(j)) - expected) <= 1e-9);
    }
  }
  const Vector q = vec({0.05, -0.1, 0.02});
  const auto loc = locator.locate(q);
  REQUIRE(loc.vertex_indices.size() == 4);
  Vector centroid = Vector::Zero(3);
  for (const auto v : loc.vertex_indices) centroid += p.row(v).transpose() / 4.0;
  const auto at_centroid = locator.locate(centroid);
  CHECK(at_centroid.vertex_indices == loc.vertex_indices);
  for (int j = 0; j < 4; ++j) CHECK(at_centroid.weights(j) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("location matches the empty-circumball oracle") {
  numkit::Rng rng(7);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 2;
    const int n = 6 + trial % 8;
    const Matrix p = random_points(rng, n, d);
    const HullLocator locator(p);
    for (int k = 0; k < 10; ++k) {
      const Vector q = p.colwise().mean().transpose() + 0.3 * random_points(rng, 1, d).row(0).transpose();
      const auto brute = oracle::delaunay_simplices_containing(p, q);
      if (brute.size() != 1) continue;
      const auto loc = locator.locate(q);
      std::vector<Eigen::Index> expected(brute[0].vertices.begin(), brute[0].vertices.end());
      CHECK(loc.vertex_indices == expected);
      for (std::size_t j = 0; j < expected.size(); ++j) {
        CHECK(std::abs(loc.weights(static_cast<Eigen::Index>(j)) - brute[0].weights(static_cast<Eigen::Index>(j))) <=
              1e-8);
      }
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("location is invariant under similarity transforms") {
  numkit::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3;
    const Matrix p = random_points(rng, 20, d);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    const Matrix rotation = Eigen::HouseholderQR<Matrix>(g).householderQ();
    const Vector shift = random_points(rng, 1, d).row(0).transpose() * 5.0;
    const double scale = 0.01 + 100.0 * rng.uniform();
    const Matrix moved = ((p * rotation.transpose()) * scale).rowwise() + shift.transpose();
    const HullLocator a(p), b(moved);
    for (int k = 0; k < 10; ++k) {
      const Vector q = 0.4 * random_points(rng, 1, d).row(0).transpose();
      if (oracle::delaunay_simplices_containing(p, q).size() != 1) continue;
      const Vector mq = scale * (rotation * q) + shift;
      CHECK(a.locate(q).vertex_indices == b.locate(mq).vertex_indices);
    }
  }
}

TEST_CASE("extrapolation locates the projection") {
  const Dataset data = square();
  const auto loc = delaunay_locate(vec({2.0, 0.5}), data);
  CHECK(loc.was_projected);
  CHECK(loc.residual == doctest::Approx(1.0).epsilon(1e-8));
  CHECK((loc.located_point - vec({1.0, 0.5})).norm() < 1e-8);
  check_location(loc, data.points);
  // the projection lies on an edge; any third vertex carries zero weight
  for (std::size_t j = 0; j < loc.vertex_indices.size(); ++j) {
    if (loc.weights(static_cast<Eigen::Index>(j)) > 1e-9) CHECK(data.points(loc.vertex_indices[j], 0) == 1.0);
  }
}

TEST_CASE("cospherical ties are broken deterministically") {
  const Dataset data = square();
  const auto a = delaunay_locate(vec({0.5, 0.5}), data);
  const auto b = delaunay_locate(vec({0.5, 0.5}), data);
  CHECK(a.vertex_indices == b.vertex_indices);
  CHECK(a.vertex_indices.size() == 3);
  check_location(a, data.points);
  // a 3x3 grid: every query must still resolve to a valid triangle
  Matrix grid(9, 2);
  for (int i = 0; i < 9; ++i) grid.row(i) << i % 3, i / 3;
  const HullLocator locator(grid);
  numkit::Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    const Vector q = vec({rng.uniform(0, 2), rng.uniform(0, 2)});
    const auto loc = locator.locate(q);
    check_location(loc, grid);
    CHECK_FALSE(loc.was_projected);
  }
}

TEST_CASE("data on a lower-dimensional affine subspace") {
  // a plane in R^3
  numkit::Rng rng(10);
  Matrix p(15, 3);
  for (int i = 0; i < 15; ++i) {
    const double u = rng.uniform(-1, 1), v = rng.uniform(-1, 1);
    p.row(i) << u, v, 0.5 * u - 0.25 * v + 1.0;
  }
  const HullLocator locator(p);
  CHECK(locator.affine_dimension() == 2);
  const Vector q = vec({0.1, 0.2, 0.5 * 0.1 - 0.25 * 0.2 + 1.0});
  const auto loc = locator.locate(q);
  CHECK(loc.affine_dimension == 2);
  CHECK(loc.vertex_indices.size() == 3);
  CHECK_FALSE(loc.was_projected);
  check_location(loc, p);
  CHECK((loc.located_point - q).norm() < 1e-8);

  const Vector off = q + vec({0.0, 0.0, 0.3});
  const auto projected = locator.locate(off);
  CHECK(projected.was_projected);
  CHECK(projected.residual > 0.0);
  CHECK_FALSE(locator.side(off).inside);
}

TEST_CASE("barycentric weights") {
  Matrix tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  Vector w = barycentric_weights(tri, vec({0.25, 0.25}));
  CHECK(w(0) == doctest::Approx(0.5));
  CHECK(w(1) == doctest::Approx(0.25));
  CHECK(w(2) == doctest::Approx(0.25));
  w = barycentric_weights(tri, vec({0.0, 0.0}));
  CHECK(w(0) == doctest::Approx(1.0));
  CHECK(std::abs(w(1)) < 1e-15);

  Matrix seg(2, 1);
  seg << 0, 1;
  w = barycentric_weights(seg, vec({0.25}));
  CHECK(w(0) == doctest::Approx(0.75));
  CHECK(w(1) == doctest::Approx(0.25));

  Matrix flat(3, 2);
  flat << 0, 0, 1, 1, 2, 2;
  try {
    barycentric_weights(flat, vec({0.5, 0.5}));
    FAIL("expected SingularSimplex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularSimplex);
  }
}

TEST_CASE("repeated location calls agree") {
  numkit::Rng rng(12);
  const Matrix p = random_points(rng, 200, 5);
  const HullLocator locator(p);
  for (int k = 0; k < 20; ++k) {
    const Vector q = 0.5 * random_points(rng, 1, 5).row(0).transpose();
    const auto a = locator.locate(q);
    const auto b = locator.locate(q);
    CHECK(a.vertex_indices == b.vertex_indices);
    CHECK((a.weights - b.weights).norm() == 0.0);
    check_location(a, p);
  }
}
