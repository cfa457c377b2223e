#include "platevi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "platevi/common.hpp"

namespace platevi {

namespace {

void add_s3(QuadratureRule& rule, double a, double w) {
  // orbit (a, a, 1-2a) in barycentric coordinates
  const double c = 1.0 - 2.0 * a;
  rule.points.push_back({a, a});
  rule.points.push_back({c, a});
  rule.points.push_back({a, c});
  for (int i = 0; i < 3; ++i) rule.weights.push_back(w);
}

void add_s111(QuadratureRule& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const std::array<std::array<double, 2>, 6> perms = {{{a, b}, {b, a}, {b, c}, {c, b}, {c, a}, {a, c}}};
  for (const auto& p : perms) {
    rule.points.push_back(p);
    rule.weights.push_back(w);
  }
}

}  // namespace

QuadratureRule triangle_rule(int degree) {
  if (degree < 0 || degree > 6) {
    throw InvalidArgument("triangle quadrature supports degree 0..6, got " + std::to_string(degree));
  }
  QuadratureRule rule;
  rule.domain = QuadratureDomain::Triangle;
  switch (degree) {
    case 0:
    case 1:
      rule.degree = 1;
      rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
      rule.weights = {0.5};
      break;
    case 2:
      rule.degree = 2;
      rule.points = {{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
      rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
      break;
    case 3:
    case 4:
      rule.degree = 4;
      add_s3(rule, 0.4459484909159648863183293, 0.1116907948390057328475035);
      add_s3(rule, 0.09157621350977074345957146, 0.05497587182766093381916316);
      break;
    case 5: {
      // Radon's 7-point rule
      rule.degree = 5;
      const double s15 = std::sqrt(15.0);
      rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(9.0 / 80.0);
      add_s3(rule, (6.0 - s15) / 21.0, (155.0 - s15) / 2400.0);
      add_s3(rule, (6.0 + s15) / 21.0, (155.0 + s15) / 2400.0);
      break;
    }
    default:
      rule.degree = 6;
      add_s3(rule, 0.2492867451709104212916386, 0.05839313786318968301264481);
      add_s3(rule, 0.0630890144915022283403316, 0.0254224531851034084604684);
      add_s111(rule, 0.05314504984481694735324967, 0.3103524510337844054166077, 0.04142553780918678759677673);
      break;
  }
  return rule;
}

QuadratureRule interval_rule(int degree) {
  if (degree < 0 || degree > 9) {
    throw InvalidArgument("interval quadrature supports degree 0..9, got " + std::to_string(degree));
  }
  const int n = degree / 2 + 1;
  QuadratureRule rule;
  rule.domain = QuadratureDomain::Interval;
  rule.degree = 2 * n - 1;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on the Legendre polynomial P_n, roots ordered ascending
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 0 ? 1.0 : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.points[static_cast<std::size_t>(i)] = {0.5 * (x + 1.0), 0.0};
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule quadrature(QuadratureDomain domain, int degree) {
  return domain == QuadratureDomain::Triangle ? triangle_rule(degree) : interval_rule(degree);
}

}  // namespace platevi
