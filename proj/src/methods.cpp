#include "interpbound/methods.hpp"

#include <cmath>
#include <limits>

#include "interpbound/gp.hpp"
#include "interpbound/lipschitz.hpp"

namespace interpbound::harness {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::delaunay: return "delaunay";
    case Method::tps: return "tps";
    case Method::gp: return "gp";
    case Method::mlp: return "mlp";
  }
  return "delaunay";
}

Method parse_method(std::string_view name) {
  if (name == "delaunay") return Method::delaunay;
  if (name == "tps") return Method::tps;
  if (name == "gp") return Method::gp;
  if (name == "mlp") return Method::mlp;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view list) {
  std::vector<Method> methods;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    auto name = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) {
      const Method m = parse_method(name);
      if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods given");
  return methods;
}

namespace {

class DelaunayMethod : public FittedMethod {
 public:
  explicit DelaunayMethod(const Dataset& data) : interpolant_(data) {}
  Method method() const override { return Method::delaunay; }
  MethodPrediction predict(const Vector& q) const override {
    const auto p = interpolant_.predict(q);
    MethodPrediction out;
    out.value = p.value;
    out.bound = p.bound.bound_value;
    out.parts = {{"gamma_hat", p.bound.gamma_hat}, {"sigma_hat", p.bound.sigma_hat}, {"k", p.bound.k},
                 {"h", p.bound.h},                 {"L", p.bound.lipschitz}};
    out.attribution = p.contributing;
    out.was_projected = p.location.was_projected;
    out.residual = p.location.residual;
    return out;
  }

 private:
  delaunay::Interpolant interpolant_;
};

class TpsMethod : public FittedMethod {
 public:
  TpsMethod(const Dataset& data, const MethodOptions& options) : model_(tps::fit(data)) {
    const tps::Box region = options.fill_region ? *options.fill_region : tps::bounding_box(data.points);
    const double h = tps::fill_distance(data, region, options.fill_samples, options.seed);
    bound_ = tps::practical_bound(lipschitz_estimate(data, options.seed), h);
  }
  Method method() const override { return Method::tps; }
  MethodPrediction predict(const Vector& q) const override {
    MethodPrediction out;
    out.value = model_.predict(q);
    out.bound = bound_.bound_value;
    out.parts = {{"L", bound_.lipschitz}, {"h", bound_.fill_distance}};
    return out;
  }

 private:
  tps::Model model_;
  tps::BoundParts bound_;
};

class GpMethod : public FittedMethod {
 public:
  explicit GpMethod(const Dataset& data) : model_(gp::fit(data)) {}
  Method method() const override { return Method::gp; }
  MethodPrediction predict(const Vector& q) const override {
    const auto p = model_.predict(q);
    MethodPrediction out;
    out.value = p.mean;
    out.bound = p.bound_value;
    out.parts = {{"variance", p.variance}, {"tau", model_.tau}, {"tau_f", model_.tau_f}};
    return out;
  }

 private:
  gp::Model model_;
};

class MlpMethod : public FittedMethod {
 public:
  MlpMethod(const Dataset& data, const mlp::Config& config) : model_(mlp::train(data, config)) {}
  Method method() const override { return Method::mlp; }
  MethodPrediction predict(const Vector& q) const override {
    MethodPrediction out;
    out.value = model_.predict(q);
    out.bound = std::numeric_limits<double>::quiet_NaN();
    out.parts = {{"validation_mse", model_.validation_mse}};
    return out;
  }

 private:
  mlp::Model model_;
};

}  // namespace

std::unique_ptr<FittedMethod> fit_method(Method method, const Dataset& data, const MethodOptions& options) {
  switch (method) {
    case Method::delaunay: return std::make_unique<DelaunayMethod>(data);
    case Method::tps: return std::make_unique<TpsMethod>(data, options);
    case Method::gp: return std::make_unique<GpMethod>(data);
    case Method::mlp: return std::make_unique<MlpMethod>(data, options.mlp);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace interpbound::harness
