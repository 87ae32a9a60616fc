#pragma once

// Uniform front over the four regressors so that studies and the CLI can
// treat them alike. Everything here works in model coordinates; callers own
// any rescaling.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "interpbound/delaunay.hpp"
#include "interpbound/mlp.hpp"
#include "interpbound/tps.hpp"

namespace interpbound::harness {

enum class Method { delaunay, tps, gp, mlp };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
/// Comma-separated names, e.g. "delaunay,tps".
std::vector<Method> parse_method_list(std::string_view list);

struct MethodOptions {
  mlp::Config mlp;
  /// Fill-distance region for the TPS bound; the data bounding box if unset.
  std::optional<tps::Box> fill_region;
  std::size_t fill_samples = 10000;
  std::uint64_t seed = 0;
};

struct MethodPrediction {
  double value = 0.0;
  /// NaN for methods without an error estimate (mlp).
  double bound = 0.0;
  /// Named bound components, in a fixed order per method.
  std::vector<std::pair<std::string, double>> parts;
  /// Delaunay only: simplex vertices with weights and responses.
  std::vector<delaunay::Contribution> attribution;
  bool was_projected = false;
  double residual = 0.0;
};

class FittedMethod {
 public:
  virtual ~FittedMethod() = default;
  virtual Method method() const = 0;
  virtual MethodPrediction predict(const Vector& q) const = 0;
};

std::unique_ptr<FittedMethod> fit_method(Method method, const Dataset& data, const MethodOptions& options = {});

}  // namespace interpbound::harness
