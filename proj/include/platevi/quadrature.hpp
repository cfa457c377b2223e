#pragma once

#include <array>
#include <vector>

namespace platevi {

enum class QuadratureDomain { Triangle, Interval };

/// Points and weights on a reference domain: the unit triangle
/// {(s,t) : s,t >= 0, s+t <= 1} (measure 1/2) or the unit interval [0,1]
/// (measure 1, only the first coordinate is used).
struct QuadratureRule {
  QuadratureDomain domain = QuadratureDomain::Triangle;
  int degree = 0;  // exactness degree
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
};

/// Symmetric rule exact up to `degree` (0..6). Degree 2 is the edge-midpoint rule.
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] exact up to `degree` (0..9).
QuadratureRule interval_rule(int degree);

QuadratureRule quadrature(QuadratureDomain domain, int degree);

}  // namespace platevi
