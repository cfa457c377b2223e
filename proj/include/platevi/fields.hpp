#pragma once

#include <functional>
#include <map>
#include <string>

#include "platevi/mesh.hpp"
#include "platevi/space.hpp"

namespace platevi {

/// Catalog entry: a field name plus its named real parameters.
///
/// Known names and parameters (defaults in brackets):
///   constant           value [0]
///   sinsin             amplitude [1]            a sin(pi x) sin(pi y)
///   manufactured_rhs   beta [1]                 (4 pi^4 beta + 1) sin(pi x) sin(pi y)
///   paraboloid         base [0.05], curvature [0.5], cx [0.5], cy [0.5]
///                                               base + curvature ((x-cx)^2 + (y-cy)^2)
struct FieldSpec {
  std::string name;
  std::map<std::string, double> params;

  bool operator==(const FieldSpec&) const = default;
};

/// A smooth scalar field with closed-form derivatives up to fourth order.
class Field {
 public:
  Field() = default;

  [[nodiscard]] double value(Point2 p) const { return value_(p); }
  [[nodiscard]] Point2 gradient(Point2 p) const { return gradient_(p); }
  [[nodiscard]] Hessian2 hessian(Point2 p) const { return hessian_(p); }
  [[nodiscard]] double laplacian(Point2 p) const {
    const auto h = hessian_(p);
    return h.xx + h.yy;
  }
  [[nodiscard]] double bilaplacian(Point2 p) const { return bilaplacian_(p); }
  [[nodiscard]] const FieldSpec& spec() const noexcept { return spec_; }

  [[nodiscard]] ScalarFunction as_function() const { return value_; }

 private:
  friend Field make_field(const FieldSpec& spec);

  FieldSpec spec_;
  std::function<double(Point2)> value_;
  std::function<Point2(Point2)> gradient_;
  std::function<Hessian2(Point2)> hessian_;
  std::function<double(Point2)> bilaplacian_;
};

/// Build a field from the catalog. Unknown names or parameters are rejected.
Field make_field(const FieldSpec& spec);

namespace fields {
FieldSpec constant(double value);
FieldSpec sinsin(double amplitude = 1.0);
FieldSpec manufactured_rhs(double beta);
FieldSpec paraboloid(double base, double curvature, double cx = 0.5, double cy = 0.5);
}  // namespace fields

}  // namespace platevi
