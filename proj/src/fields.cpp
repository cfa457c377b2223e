#include "platevi/fields.hpp"

#include <cmath>
#include <numbers>

namespace platevi {

namespace {

using ParamMap = std::map<std::string, double>;

ParamMap resolve(const FieldSpec& spec, const ParamMap& defaults) {
  ParamMap out = defaults;
  for (const auto& [key, value] : spec.params) {
    if (!defaults.contains(key)) {
      throw InvalidArgument("field '" + spec.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw InvalidArgument("field '" + spec.name + "' parameter '" + key + "' is not finite");
    }
    out[key] = value;
  }
  return out;
}

}  // namespace

Field make_field(const FieldSpec& spec) {
  constexpr double pi = std::numbers::pi;
  Field f;
  f.spec_ = spec;
  if (spec.name == "constant") {
    const auto p = resolve(spec, {{"value", 0.0}});
    const double c = p.at("value");
    f.value_ = [c](Point2) { return c; };
    f.gradient_ = [](Point2) { return Point2{}; };
    f.hessian_ = [](Point2) { return Hessian2{}; };
    f.bilaplacian_ = [](Point2) { return 0.0; };
  } else if (spec.name == "sinsin" || spec.name == "manufactured_rhs") {
    double a = 1.0;
    if (spec.name == "sinsin") {
      a = resolve(spec, {{"amplitude", 1.0}}).at("amplitude");
    } else {
      const double beta = resolve(spec, {{"beta", 1.0}}).at("beta");
      a = 4.0 * std::pow(pi, 4) * beta + 1.0;
    }
    f.value_ = [a](Point2 p) { return a * std::sin(pi * p.x) * std::sin(pi * p.y); };
    f.gradient_ = [a](Point2 p) {
      return Point2{a * pi * std::cos(pi * p.x) * std::sin(pi * p.y), a * pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
    };
    f.hessian_ = [a](Point2 p) {
      const double ss = std::sin(pi * p.x) * std::sin(pi * p.y);
      const double cc = std::cos(pi * p.x) * std::cos(pi * p.y);
      return Hessian2{-a * pi * pi * ss, a * pi * pi * cc, -a * pi * pi * ss};
    };
    f.bilaplacian_ = [a](Point2 p) { return 4.0 * std::pow(pi, 4) * a * std::sin(pi * p.x) * std::sin(pi * p.y); };
  } else if (spec.name == "paraboloid") {
    const auto p = resolve(spec, {{"base", 0.05}, {"curvature", 0.5}, {"cx", 0.5}, {"cy", 0.5}});
    const double base = p.at("base");
    const double k = p.at("curvature");
    const double cx = p.at("cx");
    const double cy = p.at("cy");
    f.value_ = [=](Point2 q) { return base + k * ((q.x - cx) * (q.x - cx) + (q.y - cy) * (q.y - cy)); };
    f.gradient_ = [=](Point2 q) { return Point2{2.0 * k * (q.x - cx), 2.0 * k * (q.y - cy)}; };
    f.hessian_ = [k](Point2) { return Hessian2{2.0 * k, 0.0, 2.0 * k}; };
    f.bilaplacian_ = [](Point2) { return 0.0; };
  } else {
    throw InvalidArgument("unknown field '" + spec.name + "'");
  }
  return f;
}

namespace fields {

FieldSpec constant(double value) { return {"constant", {{"value", value}}}; }
FieldSpec sinsin(double amplitude) { return {"sinsin", {{"amplitude", amplitude}}}; }
FieldSpec manufactured_rhs(double beta) { return {"manufactured_rhs", {{"beta", beta}}}; }
FieldSpec paraboloid(double base, double curvature, double cx, double cy) {
  return {"paraboloid", {{"base", base}, {"curvature", curvature}, {"cx", cx}, {"cy", cy}}};
}

}  // namespace fields

}  // namespace platevi
