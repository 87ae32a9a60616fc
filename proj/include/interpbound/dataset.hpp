#pragma once

#include <filesystem>
#include <iosfwd>

#include "interpbound/numkit.hpp"

namespace interpbound {

/// n training inputs in d dimensions (one per row) with their responses.
struct Dataset {
  Matrix points;
  Vector responses;

  Dataset() = default;
  /// Validates shape and finiteness; throws DimensionMismatch / NonFiniteValue.
  Dataset(Matrix points, Vector responses);

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dimension() const { return points.cols(); }
  Vector point(Eigen::Index i) const { return points.row(i).transpose(); }
};

/// Parses `x1,...,xd,y` CSV. Every record must carry d+1 finite fields.
Dataset read_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);

/// Query files may omit the response column; `has_responses` tells which.
struct QueryTable {
  Matrix points;
  Vector responses;
  bool has_responses = false;
};
QueryTable read_query_csv(std::istream& in);
QueryTable load_query_csv(const std::filesystem::path& path);

/// Writes with 17 significant digits so a reload is bit-exact.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Formats a double with 17 significant digits.
std::string format_real(double value);

enum class Direction { forward, inverse };

/// Affine per-coordinate map: inputs min-max onto [-1, 1], responses
/// standardized to zero mean and unit sample standard deviation.
struct Rescaler {
  Vector input_shift;
  Vector input_scale;
  double output_shift = 0.0;
  double output_scale = 1.0;

  static Rescaler identity(Eigen::Index dimension);

  Eigen::Index dimension() const { return input_shift.size(); }
  Vector forward_point(const Vector& x) const;
  Vector inverse_point(const Vector& x) const;
  Matrix forward_points(const Matrix& points) const;
  double forward_value(double y) const { return (y - output_shift) / output_scale; }
  double inverse_value(double y) const { return y * output_scale + output_shift; }
};

Rescaler fit_rescaler(const Dataset& data);

/// Throws DimensionMismatch when the rescaler and the data disagree on d.
Dataset apply_rescaler(const Rescaler& rescaler, const Dataset& data, Direction direction);

}  // namespace interpbound
