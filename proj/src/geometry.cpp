#include "interpbound/geometry.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace interpbound::geometry {

namespace {

constexpr double kOptimalityTolerance = 1e-11;
constexpr double kPivotTolerance = 1e-11;
constexpr double kSupportTolerance = 1e-12;
constexpr int kDegenerateRunBeforeBland = 50;

struct LpSolution {
  bool feasible = false;
  double infeasibility = 0.0;
  /// Basic variables; indices >= n are artificial.
  std::vector<Eigen::Index> basis;
  Vector values;
};

// Revised simplex over the lifted weight LP. The constraint matrix is
// [y_j; 1] for every data column j, plus one artificial column per row.
// The basis is tiny (affine dimension + 1), so B^{-1} is simply recomputed
// at each iteration; pricing the n columns dominates the cost.
class LiftedLp {
 public:
  LiftedLp(const Matrix& points, const Vector& cost)
      : y_(points), cost_(cost), rows_(points.rows() + 1), n_(points.cols()) {}

  LpSolution solve(const Vector& target, bool membership_only, double feasibility_tolerance) {
    b_.resize(rows_);
    b_.head(rows_ - 1) = target;
    b_(rows_ - 1) = 1.0;
    sign_.resize(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) sign_(i) = b_(i) < 0.0 ? -1.0 : 1.0;
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    in_basis_.assign(static_cast<std::size_t>(n_), 0);

    LpSolution result;
    iterate(true, membership_only ? feasibility_tolerance : 0.0);
    refactor();
    result.infeasibility = artificial_sum();
    result.feasible = result.infeasibility <= feasibility_tolerance;
    if (result.feasible && !membership_only) {
      drive_out_artificials();
      iterate(false, 0.0);
      refactor();
    }
    result.basis = basis_;
    result.values = x_;
    return result;
  }

 private:
  bool artificial(Eigen::Index var) const { return var >= n_; }

  Vector column(Eigen::Index var) const {
    Vector a = Vector::Zero(rows_);
    if (artificial(var)) {
      a(var - n_) = sign_(var - n_);
    } else {
      a.head(rows_ - 1) = y_.col(var);
      a(rows_ - 1) = 1.0;
    }
    return a;
  }

  void refactor() {
    Matrix basis_matrix(rows_, rows_);
    for (Eigen::Index k = 0; k < rows_; ++k) basis_matrix.col(k) = column(basis_[static_cast<std::size_t>(k)]);
    binv_ = basis_matrix.partialPivLu().inverse();
    x_ = binv_ * b_;
    for (Eigen::Index k = 0; k < rows_; ++k) x_(k) = std::max(x_(k), 0.0);
  }

  double artificial_sum() const {
    double total = 0.0;
    for (Eigen::Index k = 0; k < rows_; ++k) {
      if (artificial(basis_[static_cast<std::size_t>(k)])) total += x_(k);
    }
    return total;
  }

  double basic_cost(Eigen::Index var, bool phase_one) const {
    if (artificial(var)) return phase_one ? 1.0 : 0.0;
    return phase_one ? 0.0 : cost_(var);
  }

  void pivot(Eigen::Index row, Eigen::Index entering) {
    auto& leaving = basis_[static_cast<std::size_t>(row)];
    if (!artificial(leaving)) in_basis_[static_cast<std::size_t>(leaving)] = 0;
    leaving = entering;
    in_basis_[static_cast<std::size_t>(entering)] = 1;
  }

  // Runs the simplex method for one phase. In phase one, stops early once the
  // artificial sum falls below `early_exit` (membership queries need no more).
  void iterate(bool phase_one, double early_exit) {
    const long max_iterations = 50 * (static_cast<long>(n_) + rows_) + 1000;
    int degenerate_run = 0;
    Vector duals(rows_);
    Vector reduced(n_);
    for (long iteration = 0; iteration < max_iterations; ++iteration) {
      refactor();
      if (phase_one && early_exit > 0.0 && artificial_sum() <= early_exit) return;
      Vector basic_costs(rows_);
      for (Eigen::Index k = 0; k < rows_; ++k) basic_costs(k) = basic_cost(basis_[static_cast<std::size_t>(k)], phase_one);
      duals.noalias() = binv_.transpose() * basic_costs;
      reduced.noalias() = -(y_.transpose() * duals.head(rows_ - 1));
      reduced.array() -= duals(rows_ - 1);
      if (!phase_one) reduced += cost_;

      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      Eigen::Index entering = -1;
      double best = -kOptimalityTolerance;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        if (reduced(j) < best) {
          entering = j;
          if (bland) break;
          best = reduced(j);
        }
      }
      if (entering < 0) return;

      const Vector direction = binv_ * column(entering);
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < rows_; ++k) {
        const Eigen::Index var = basis_[static_cast<std::size_t>(k)];
        double ratio;
        if (!phase_one && artificial(var)) {
          // a leftover artificial must never become positive
          if (std::abs(direction(k)) <= kPivotTolerance) continue;
          ratio = 0.0;
        } else {
          if (direction(k) <= kPivotTolerance) continue;
          ratio = x_(k) / direction(k);
        }
        const bool better = ratio < best_ratio - 1e-15;
        const bool tie = !better && ratio <= best_ratio + 1e-15 && leave >= 0 &&
                         var < basis_[static_cast<std::size_t>(leave)];
        if (better || tie) {
          best_ratio = ratio;
          leave = k;
        }
      }
      if (leave < 0) throw Error(ErrorCode::ConvergenceFailure, "simplex location LP reported unbounded");
      degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;
      pivot(leave, entering);
    }
    throw Error(ErrorCode::ConvergenceFailure, "simplex location LP hit its iteration cap");
  }

  void drive_out_artificials() {
    for (Eigen::Index k = 0; k < rows_; ++k) {
      if (!artificial(basis_[static_cast<std::size_t>(k)])) continue;
      const Vector row = binv_.row(k).transpose();
      Vector entries = y_.transpose() * row.head(rows_ - 1);
      entries.array() += row(rows_ - 1);
      Eigen::Index chosen = -1;
      double largest = 1e-9;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        if (std::abs(entries(j)) > largest) {
          largest = std::abs(entries(j));
          chosen = j;
        }
      }
      if (chosen >= 0) {
        pivot(k, chosen);
        refactor();
      }
    }
  }

  const Matrix& y_;
  const Vector& cost_;
  Eigen::Index rows_;
  Eigen::Index n_;
  Vector b_;
  Vector sign_;
  std::vector<Eigen::Index> basis_;
  std::vector<char> in_basis_;
  Matrix binv_;
  Vector x_;
};

struct MinNormPoint {
  std::vector<Eigen::Index> support;
  Vector weights;
  Vector point;  // in the same coordinates as the input columns
  double gap = 0.0;
  bool converged = false;
};

// Minimizer over the simplex of weights of |sum_i w_i p_i - t|. Wolfe's
// method: a conditional-gradient major step adds the column most aligned
// against the current iterate, minor steps keep the iterate at the affine
// minimizer of the active set while staying inside its convex hull.
Vector affine_minimizer(const Matrix& y, const Vector& t, const std::vector<Eigen::Index>& active) {
  const auto k = static_cast<Eigen::Index>(active.size());
  Vector alpha = Vector::Zero(k);
  if (k == 1) {
    alpha(0) = 1.0;
    return alpha;
  }
  const Vector p0 = y.col(active[0]) - t;
  Matrix edges(y.rows(), k - 1);
  for (Eigen::Index i = 1; i < k; ++i) edges.col(i - 1) = y.col(active[static_cast<std::size_t>(i)]) - y.col(active[0]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(edges);
  const Vector beta = cod.solve(-p0);
  alpha(0) = 1.0 - beta.sum();
  alpha.tail(k - 1) = beta;
  return alpha;
}

MinNormPoint min_norm_point(const Matrix& y, const Vector& t, double gap_tolerance, int max_iterations) {
  const Eigen::Index n = y.cols();
  MinNormPoint result;
  Eigen::Index start = 0;
  double start_norm = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = (y.col(j) - t).squaredNorm();
    if (norm < start_norm) {
      start_norm = norm;
      start = j;
    }
  }
  std::vector<Eigen::Index> active{start};
  Vector lambda = Vector::Ones(1);
  Vector x = y.col(start) - t;
  Vector dots(n);
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    dots.noalias() = y.transpose() * x;
    dots.array() -= t.dot(x);
    Eigen::Index j = 0;
    dots.minCoeff(&j);
    result.gap = x.squaredNorm() - dots(j);
    if (result.gap <= gap_tolerance) {
      result.converged = true;
      break;
    }
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lambda.conservativeResize(lambda.size() + 1);
    lambda(lambda.size() - 1) = 0.0;

    while (true) {
      const Vector alpha = affine_minimizer(y, t, active);
      if ((alpha.array() > kSupportTolerance).all()) {
        lambda = alpha;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha(i) <= kSupportTolerance && lambda(i) - alpha(i) > 0.0) {
          theta = std::min(theta, lambda(i) / (lambda(i) - alpha(i)));
        }
      }
      lambda = theta * alpha + (1.0 - theta) * lambda;
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_weights;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > kSupportTolerance) {
          kept.push_back(active[static_cast<std::size_t>(i)]);
          kept_weights.push_back(lambda(i));
        }
      }
      if (kept.size() == active.size()) {
        // theta hit no weight exactly; drop the smallest to guarantee progress
        Eigen::Index smallest = 0;
        lambda.minCoeff(&smallest);
        kept.erase(kept.begin() + smallest);
        kept_weights.erase(kept_weights.begin() + smallest);
      }
      active = std::move(kept);
      lambda = Eigen::Map<Vector>(kept_weights.data(), static_cast<Eigen::Index>(kept_weights.size()));
      lambda /= lambda.sum();
      if (active.size() == 1) break;
    }
    x = -t;
    for (std::size_t i = 0; i < active.size(); ++i) x += lambda(static_cast<Eigen::Index>(i)) * y.col(active[i]);
  }
  result.support = active;
  result.weights = lambda;
  result.point = x + t;
  return result;
}

std::vector<HullWeight> basic_weights(const LpSolution& lp, Eigen::Index n) {
  std::vector<HullWeight> weights;
  for (std::size_t k = 0; k < lp.basis.size(); ++k) {
    if (lp.basis[k] < n && lp.values(static_cast<Eigen::Index>(k)) > 0.0) {
      weights.push_back({lp.basis[k], lp.values(static_cast<Eigen::Index>(k))});
    }
  }
  std::sort(weights.begin(), weights.end(), [](const HullWeight& a, const HullWeight& b) { return a.index < b.index; });
  return weights;
}

}  // namespace

HullLocator::HullLocator(const Matrix& points, LocatorOptions options) : options_(options), points_(points) {
  if (points.rows() < 1 || points.cols() < 1) throw Error(ErrorCode::EmptyFile, "hull locator needs at least one point");
  if (!points.allFinite()) throw Error(ErrorCode::NonFiniteValue, "hull locator input has non-finite entries");
  const Eigen::Index d = points.cols();
  centroid_ = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - centroid_.transpose();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    while (rank < sv.size() && sv(rank) > options_.rank_tolerance * sv(0)) ++rank;
  }
  if (rank == d) {
    basis_ = Matrix::Identity(d, d);
  } else {
    basis_ = svd.matrixV().leftCols(rank);
  }
  Matrix coords = basis_.transpose() * centered.transpose();
  scale_ = coords.size() > 0 ? coords.colwise().norm().maxCoeff() : 0.0;
  if (!(scale_ > 0.0)) scale_ = 1.0;
  reduced_ = coords / scale_;
  lifted_cost_ = reduced_.colwise().squaredNorm().transpose();
}

Vector HullLocator::reduce(const Vector& q, double& orthogonal) const {
  if (q.size() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "query has d = " + std::to_string(q.size()) + ", data has d = " +
                                                  std::to_string(dimension()));
  }
  if (!q.allFinite()) throw Error(ErrorCode::NonFiniteValue, "query has non-finite entries");
  const Vector v = q - centroid_;
  const Vector p = basis_.transpose() * v;
  orthogonal = affine_dimension() < dimension() ? (v - basis_ * p).norm() : 0.0;
  return p / scale_;
}

Vector HullLocator::lift(const Vector& y) const { return centroid_ + basis_ * (scale_ * y); }

HullQueryResult HullLocator::side(const Vector& q) const {
  double orthogonal = 0.0;
  const Vector t = reduce(q, orthogonal);
  HullQueryResult result;
  result.residual = std::numeric_limits<double>::quiet_NaN();
  if (orthogonal > options_.feasibility_tolerance * scale_) return result;
  LiftedLp lp(reduced_, lifted_cost_);
  const auto solution = lp.solve(t, true, options_.feasibility_tolerance);
  result.inside = solution.feasible;
  if (result.inside) {
    result.residual = 0.0;
    result.hull_weights = basic_weights(solution, size());
  }
  return result;
}

HullQueryResult HullLocator::project(const Vector& q) const {
  double orthogonal = 0.0;
  const Vector t = reduce(q, orthogonal);
  HullQueryResult result;
  result.projection_available = true;
  LiftedLp lp(reduced_, lifted_cost_);
  const auto solution = lp.solve(t, true, options_.feasibility_tolerance);
  if (solution.feasible) {
    result.hull_weights = basic_weights(solution, size());
    if (orthogonal <= options_.feasibility_tolerance * scale_) {
      result.inside = true;
      result.projected_point = q;
      result.residual = 0.0;
      return result;
    }
    result.projected_point = lift(t);
  } else {
    const auto mnp = min_norm_point(reduced_, t, options_.projection_gap, options_.projection_max_iterations);
    result.converged = mnp.converged;
    result.duality_gap = std::max(mnp.gap, 0.0) * scale_ * scale_;
    for (std::size_t i = 0; i < mnp.support.size(); ++i) {
      result.hull_weights.push_back({mnp.support[i], mnp.weights(static_cast<Eigen::Index>(i))});
    }
    std::sort(result.hull_weights.begin(), result.hull_weights.end(),
              [](const HullWeight& a, const HullWeight& b) { return a.index < b.index; });
    result.projected_point = lift(mnp.point);
  }
  result.residual = (result.projected_point - q).norm();
  return result;
}

SimplexLocation HullLocator::locate(const Vector& q) const {
  double orthogonal = 0.0;
  Vector t = reduce(q, orthogonal);
  SimplexLocation location;
  location.affine_dimension = affine_dimension();
  const Eigen::Index n = size();

  if (affine_dimension() == 0) {
    location.vertex_indices = {0};
    location.weights = Vector::Ones(1);
    location.located_point = points_.row(0).transpose();
    location.residual = (location.located_point - q).norm();
    location.was_projected = location.residual > options_.feasibility_tolerance * scale_;
    location.base_vertex_index = 0;
    return location;
  }

  LiftedLp lp(reduced_, lifted_cost_);
  auto solution = lp.solve(t, false, options_.feasibility_tolerance);
  const bool in_subspace = solution.feasible;
  if (!in_subspace) {
    const auto mnp = min_norm_point(reduced_, t, options_.projection_gap, options_.projection_max_iterations);
    location.projection_converged = mnp.converged;
    t = mnp.point;
    solution = lp.solve(t, false, 1e3 * options_.feasibility_tolerance);
    if (!solution.feasible) {
      throw Error(ErrorCode::ConvergenceFailure, "hull projection is not located inside the hull");
    }
  }
  location.was_projected = !in_subspace || orthogonal > options_.feasibility_tolerance * scale_;
  location.located_point = location.was_projected ? lift(t) : q;
  location.residual = location.was_projected ? (location.located_point - q).norm() : 0.0;

  std::vector<std::pair<Eigen::Index, double>> vertices;
  for (std::size_t k = 0; k < solution.basis.size(); ++k) {
    if (solution.basis[k] < n) vertices.emplace_back(solution.basis[k], solution.values(static_cast<Eigen::Index>(k)));
  }
  std::sort(vertices.begin(), vertices.end());
  location.weights.resize(static_cast<Eigen::Index>(vertices.size()));
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    location.vertex_indices.push_back(vertices[k].first);
    location.weights(static_cast<Eigen::Index>(k)) = vertices[k].second;
    if (vertices[k].second > kSupportTolerance) {
      const double distance = (points_.row(vertices[k].first).transpose() - q).norm();
      if (distance < nearest) {
        nearest = distance;
        location.base_vertex_index = vertices[k].first;
      }
    }
  }
  return location;
}

HullQueryResult hull_side(const Vector& q, const Dataset& data) { return HullLocator(data.points).side(q); }

HullQueryResult project_to_hull(const Vector& q, const Dataset& data) { return HullLocator(data.points).project(q); }

SimplexLocation delaunay_locate(const Vector& q, const Dataset& data) { return HullLocator(data.points).locate(q); }

Vector barycentric_weights(const Matrix& vertices, const Vector& q) {
  if (vertices.rows() < 1) throw Error(ErrorCode::InvalidArgument, "simplex needs at least one vertex");
  if (vertices.cols() != q.size()) throw Error(ErrorCode::DimensionMismatch, "query and simplex dimensions differ");
  const Eigen::Index k = vertices.rows() - 1;
  Vector w(k + 1);
  if (k == 0) {
    w(0) = 1.0;
    return w;
  }
  if (k > vertices.cols()) throw Error(ErrorCode::SingularSimplex, "more than d+1 vertices are affinely dependent");
  const Vector x0 = vertices.row(0).transpose();
  const Matrix edges = (vertices.bottomRows(k).rowwise() - x0.transpose()).transpose();
  const Vector sv = numkit::svd_values(edges);
  if (!(sv(sv.size() - 1) >= 1e-12 * sv(0)) || sv(0) == 0.0) {
    throw Error(ErrorCode::SingularSimplex, "simplex edge matrix is rank deficient");
  }
  const Vector tail = numkit::least_squares(edges, q - x0).x;
  w(0) = 1.0 - tail.sum();
  w.tail(k) = tail;
  return w;
}

}  // namespace interpbound::geometry
