#include "interpbound/delaunay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "interpbound/lipschitz.hpp"

namespace interpbound::delaunay {

double BoundParts::recompute() const {
  const double h2 = h * h;
  const double shape = sigma_hat > 0.0 ? k / sigma_hat : 0.0;
  return 0.5 * gamma_hat * h2 + 0.5 * std::sqrt(static_cast<double>(dimension)) * gamma_hat * shape * h2 +
         lipschitz * residual;
}

namespace {

double divided_difference(const Dataset& data, Eigen::Index a, Eigen::Index b, Eigen::Index c) {
  const double ab = (data.points.row(b) - data.points.row(a)).norm();
  const double bc = (data.points.row(c) - data.points.row(b)).norm();
  const double ac = (data.points.row(c) - data.points.row(a)).norm();
  if (ab <= 0.0 || bc <= 0.0 || ac <= 0.0) return 0.0;
  const double slope_bc = (data.responses(c) - data.responses(b)) / bc;
  const double slope_ab = (data.responses(b) - data.responses(a)) / ab;
  return 2.0 * std::abs(slope_bc - slope_ab) / ac;
}

}  // namespace

double local_gamma(const geometry::SimplexLocation& location, const Dataset& data,
                   std::optional<Eigen::Index> neighbor) {
  const auto& v = location.vertex_indices;
  if (v.size() == 2) {
    if (!neighbor) return 0.0;
    // the single second difference, taken in coordinate order along the line
    std::array<Eigen::Index, 3> line{v[0], v[1], *neighbor};
    const Vector direction = data.points.row(v[1]) - data.points.row(v[0]);
    std::sort(line.begin(), line.end(), [&](Eigen::Index a, Eigen::Index b) {
      return data.points.row(a).dot(direction) < data.points.row(b).dot(direction);
    });
    return divided_difference(data, line[0], line[1], line[2]);
  }
  double gamma = 0.0;
  for (const auto a : v) {
    for (const auto b : v) {
      if (b == a) continue;
      for (const auto c : v) {
        if (c == a || c == b) continue;
        gamma = std::max(gamma, divided_difference(data, a, b, c));
      }
    }
  }
  return gamma;
}

BoundParts error_bound(const geometry::SimplexLocation& location, const Dataset& data, double lipschitz,
                       const BoundOptions& options, std::optional<Eigen::Index> neighbor) {
  const auto& v = location.vertex_indices;
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "empty simplex");
  BoundParts parts;
  parts.lipschitz = lipschitz;
  parts.residual = location.residual;
  parts.dimension = static_cast<Eigen::Index>(v.size()) - 1;
  if (v.size() == 1) {
    parts.bound_value = parts.recompute();
    return parts;
  }
  parts.gamma_hat = local_gamma(location, data, neighbor);

  double diameter = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      diameter = std::max(diameter, (data.points.row(v[i]) - data.points.row(v[j])).norm());
    }
  }
  parts.h = options.global_h ? *options.global_h : diameter;

  const Vector base = data.points.row(location.base_vertex_index).transpose();
  Matrix edges(data.dimension(), parts.dimension);
  Eigen::Index column = 0;
  for (const auto index : v) {
    if (index == location.base_vertex_index) continue;
    edges.col(column++) = data.points.row(index).transpose() - base;
    parts.k = std::max(parts.k, edges.col(column - 1).norm());
  }
  if (column != parts.dimension) throw Error(ErrorCode::InvalidArgument, "base vertex is not a simplex vertex");
  parts.sigma_hat = numkit::svd_values(edges).mean();
  if (parts.sigma_hat < 1e-14) throw Error(ErrorCode::SingularSimplex, "simplex has vanishing mean singular value");
  parts.bound_value = parts.recompute();
  return parts;
}

namespace {

// For 1-D data: the data point nearest the query outside the located segment.
std::optional<Eigen::Index> line_neighbor(const geometry::SimplexLocation& location, const Dataset& data,
                                          const Vector& q) {
  if (location.vertex_indices.size() != 2 || data.size() < 3) return std::nullopt;
  std::optional<Eigen::Index> best;
  double nearest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (i == location.vertex_indices[0] || i == location.vertex_indices[1]) continue;
    const double distance = (data.points.row(i).transpose() - q).norm();
    if (distance < nearest) {
      nearest = distance;
      best = i;
    }
  }
  return best;
}

Prediction assemble(geometry::SimplexLocation location, const Dataset& data, const Vector& q, double lipschitz,
                    const BoundOptions& options) {
  Prediction prediction;
  for (std::size_t k = 0; k < location.vertex_indices.size(); ++k) {
    const auto index = location.vertex_indices[k];
    const double weight = location.weights(static_cast<Eigen::Index>(k));
    prediction.contributing.push_back({index, weight, data.responses(index)});
    prediction.value += weight * data.responses(index);
  }
  prediction.bound = error_bound(location, data, lipschitz, options, line_neighbor(location, data, q));
  prediction.location = std::move(location);
  return prediction;
}

}  // namespace

Interpolant::Interpolant(Dataset data, BoundOptions options)
    : data_(std::move(data)), options_(options), locator_(data_.points) {
  if (data_.size() < data_.dimension() + 1) {
    throw Error(ErrorCode::InvalidArgument, "Delaunay interpolation needs n >= d + 1");
  }
  lipschitz_ = lipschitz_estimate(data_);
}

Prediction Interpolant::predict(const Vector& q) const {
  return assemble(locator_.locate(q), data_, q, lipschitz_, options_);
}

Prediction predict(const Vector& q, const Dataset& data) { return Interpolant(data).predict(q); }

}  // namespace interpbound::delaunay
