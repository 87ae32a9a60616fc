#include "interpbound/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace interpbound {

Dataset::Dataset(Matrix pts, Vector ys) : points(std::move(pts)), responses(std::move(ys)) {
  if (points.rows() != responses.size()) {
    throw Error(ErrorCode::DimensionMismatch, "point count " + std::to_string(points.rows()) +
                                                  " != response count " + std::to_string(responses.size()));
  }
  if (points.rows() < 1 || points.cols() < 1) {
    throw Error(ErrorCode::EmptyFile, "dataset needs at least one point in at least one dimension");
  }
  if (!points.allFinite() || !responses.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "dataset contains non-finite entries");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

/// Returns the input dimension and whether a trailing `y` column exists.
std::pair<std::size_t, bool> parse_header(std::string_view header, bool response_required) {
  const auto fields = split(header);
  const bool has_y = !fields.empty() && fields.back() == "y";
  if (response_required && !has_y) {
    throw Error(ErrorCode::MalformedHeader, "last header column must be 'y'");
  }
  const std::size_t d = fields.size() - (has_y ? 1 : 0);
  if (d == 0) throw Error(ErrorCode::MalformedHeader, "header names no input columns");
  for (std::size_t j = 0; j < d; ++j) {
    if (fields[j] != "x" + std::to_string(j + 1)) {
      throw Error(ErrorCode::MalformedHeader, "expected column 'x" + std::to_string(j + 1) + "', found '" +
                                                  std::string(fields[j]) + "'");
    }
  }
  return {d, has_y};
}

double parse_real(std::string_view field, std::size_t row) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(row) + ": cannot parse '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(row) + ": non-finite value");
  }
  return value;
}

QueryTable parse_table(std::istream& in, bool response_required) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw Error(ErrorCode::EmptyFile, "no header row");
  const auto [d, has_y] = parse_header(line, response_required);
  const std::size_t width = d + (has_y ? 1 : 0);
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width) {
      throw Error(ErrorCode::MalformedHeader, "row " + std::to_string(rows) + " has " +
                                                  std::to_string(fields.size()) + " fields, expected " +
                                                  std::to_string(width));
    }
    for (const auto field : fields) values.push_back(parse_real(field, rows));
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::EmptyFile, "no data records");
  QueryTable table;
  table.has_responses = has_y;
  table.points.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  table.responses = Vector::Zero(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      table.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * width + j];
    }
    if (has_y) table.responses(static_cast<Eigen::Index>(i)) = values[i * width + d];
  }
  return table;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return in;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  auto table = parse_table(in, true);
  return Dataset(std::move(table.points), std::move(table.responses));
}

Dataset load_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_csv(in);
}

QueryTable read_query_csv(std::istream& in) { return parse_table(in, false); }

QueryTable load_query_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_query_csv(in);
}

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (Eigen::Index j = 0; j < data.dimension(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dimension(); ++j) out << format_real(data.points(i, j)) << ',';
    out << format_real(data.responses(i)) << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  write_csv(out, data);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Rescaler Rescaler::identity(Eigen::Index dimension) {
  Rescaler r;
  r.input_shift = Vector::Zero(dimension);
  r.input_scale = Vector::Ones(dimension);
  return r;
}

Vector Rescaler::forward_point(const Vector& x) const {
  return (x - input_shift).cwiseQuotient(input_scale);
}

Vector Rescaler::inverse_point(const Vector& x) const {
  return x.cwiseProduct(input_scale) + input_shift;
}

Matrix Rescaler::forward_points(const Matrix& points) const {
  if (points.cols() != dimension()) throw Error(ErrorCode::DimensionMismatch, "rescaler dimension mismatch");
  return (points.rowwise() - input_shift.transpose()).array().rowwise() / input_scale.transpose().array();
}

Rescaler fit_rescaler(const Dataset& data) {
  Rescaler r;
  const Vector lo = data.points.colwise().minCoeff();
  const Vector hi = data.points.colwise().maxCoeff();
  r.input_shift = 0.5 * (lo + hi);
  r.input_scale = 0.5 * (hi - lo);
  for (Eigen::Index j = 0; j < r.input_scale.size(); ++j) {
    // a constant column maps to 0
    if (!(r.input_scale(j) > 0.0)) {
      r.input_shift(j) = lo(j);
      r.input_scale(j) = 1.0;
    }
  }
  const double n = static_cast<double>(data.size());
  r.output_shift = data.responses.mean();
  r.output_scale = 1.0;
  if (data.size() > 1) {
    const double ss = (data.responses.array() - r.output_shift).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd > 0.0) r.output_scale = sd;
  }
  return r;
}

Dataset apply_rescaler(const Rescaler& rescaler, const Dataset& data, Direction direction) {
  if (rescaler.dimension() != data.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "rescaler has d = " + std::to_string(rescaler.dimension()) +
                                                  ", data has d = " + std::to_string(data.dimension()));
  }
  if (direction == Direction::forward) {
    Vector ys = (data.responses.array() - rescaler.output_shift) / rescaler.output_scale;
    return Dataset(rescaler.forward_points(data.points), std::move(ys));
  }
  Matrix pts = (data.points.array().rowwise() * rescaler.input_scale.transpose().array()).rowwise() +
               rescaler.input_shift.transpose().array();
  Vector ys = data.responses.array() * rescaler.output_scale + rescaler.output_shift;
  return Dataset(std::move(pts), std::move(ys));
}

}  // namespace interpbound
