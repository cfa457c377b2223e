#include "platevi/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "platevi/quadrature.hpp"

namespace platevi {

std::string_view to_string(Method m) { return m == Method::C0ip ? "c0ip" : "mixed"; }

Method parse_method(std::string_view name) {
  if (name == "c0ip") return Method::C0ip;
  if (name == "mixed") return Method::Mixed;
  throw InvalidArgument("unknown method '" + std::string(name) + "' (expected c0ip or mixed)");
}

int state_degree(Method m) { return m == Method::C0ip ? 2 : 1; }

void ProblemSpec::validate(const Mesh& mesh) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be a positive finite number");
  if (method == Method::C0ip && (!(sigma > 0.0) || !std::isfinite(sigma))) {
    throw InvalidArgument("sigma must be a positive finite number");
  }
  (void)make_field(y_d);
  const Field obstacle = make_field(psi);
  const auto rule = interval_rule(4);
  double lowest = std::numeric_limits<double>::infinity();
  for (const Edge& e : mesh.edges()) {
    if (!e.boundary()) continue;
    const Point2 a = mesh.vertex(e.vertices[0]);
    const Point2 b = mesh.vertex(e.vertices[1]);
    for (const auto& q : rule.points) lowest = std::min(lowest, obstacle.value(a + q[0] * (b - a)));
  }
  if (!(lowest > 0.0)) {
    throw InvalidArgument("obstacle psi must be positive on the boundary (minimum " + std::to_string(lowest) + ")");
  }
}

namespace {

std::array<double, 3> reference_to_barycentric(const std::array<double, 2>& q) {
  return {1.0 - q[0] - q[1], q[0], q[1]};
}

SparsityPattern element_pattern(const FeSpace& space) {
  SparsityPattern pattern(space.size());
  for (Index t = 0; t < space.mesh().num_triangles(); ++t) pattern.add_clique(space.local_dofs(t));
  return pattern;
}

// Mass and stiffness share a loop; either target may be null.
void assemble_volume(const FeSpace& space, SparseSymMatrix* mass, SparseSymMatrix* stiffness) {
  const auto mass_rule = triangle_rule(4);
  const auto grad_rule = triangle_rule(2);
  const int ls = space.local_size();
  for (Index t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto geom = TriangleGeometry::of(space.mesh(), t);
    const auto dofs = space.local_dofs(t);
    if (mass) {
      for (std::size_t q = 0; q < mass_rule.size(); ++q) {
        const auto b = eval_local_basis(space.degree(), geom, reference_to_barycentric(mass_rule.points[q]));
        const double w = mass_rule.weights[q] * 2.0 * geom.area;
        for (int i = 0; i < ls; ++i) {
          for (int j = 0; j < ls; ++j) {
            mass->add(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                      w * (b.values[static_cast<std::size_t>(i)] * b.values[static_cast<std::size_t>(j)]));
          }
        }
      }
    }
    if (stiffness) {
      for (std::size_t q = 0; q < grad_rule.size(); ++q) {
        const auto b = eval_local_basis(space.degree(), geom, reference_to_barycentric(grad_rule.points[q]));
        const double w = grad_rule.weights[q] * 2.0 * geom.area;
        for (int i = 0; i < ls; ++i) {
          for (int j = 0; j < ls; ++j) {
            stiffness->add(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                           w * dot(b.gradients[static_cast<std::size_t>(i)], b.gradients[static_cast<std::size_t>(j)]));
          }
        }
      }
    }
  }
}

Vector mass_solve(const SparseSymMatrix& mass, std::span<const double> rhs, double tol) {
  SolveOptions opts;
  opts.tol = tol;
  opts.method = SolveMethod::ConjugateGradient;
  opts.preconditioner = Preconditioner::Jacobi;
  return solve_spd(mass, rhs, opts).x;
}

}  // namespace

SparseSymMatrix assemble_mass(const FeSpace& space) {
  SparseSymMatrix m(element_pattern(space));
  assemble_volume(space, &m, nullptr);
  return m;
}

SparseSymMatrix assemble_stiffness(const FeSpace& space) {
  SparseSymMatrix k(element_pattern(space));
  assemble_volume(space, nullptr, &k);
  return k;
}

SparseSymMatrix lumped_mass(const SparseSymMatrix& mass) {
  Vector d(static_cast<std::size_t>(mass.size()), 0.0);
  const auto rp = mass.row_ptr();
  const auto vals = mass.values();
  for (Index i = 0; i < mass.size(); ++i) {
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      d[static_cast<std::size_t>(i)] += vals[static_cast<std::size_t>(k)];
    }
  }
  return SparseSymMatrix::diagonal(d);
}

SparseSymMatrix assemble_c0ip(const FeSpace& space, const ProblemSpec& problem) {
  if (space.degree() != 2) {
    throw InvalidArgument("assemble_c0ip requires a degree-2 space (degree-1 functions have no Hessian)");
  }
  if (!(problem.sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const Mesh& mesh = space.mesh();
  const double beta = problem.beta;
  const double sigma = problem.sigma;

  SparsityPattern pattern = element_pattern(space);
  for (const Edge& e : mesh.edges()) {
    if (e.boundary()) continue;
    std::array<Index, 12> dofs{};
    const auto d0 = space.local_dofs(e.triangles[0]);
    const auto d1 = space.local_dofs(e.triangles[1]);
    std::copy(d0.begin(), d0.end(), dofs.begin());
    std::copy(d1.begin(), d1.end(), dofs.begin() + 6);
    pattern.add_clique(dofs);
  }
  SparseSymMatrix a(std::move(pattern));

  const auto hess_rule = triangle_rule(2);
  const auto mass_rule = triangle_rule(4);
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = TriangleGeometry::of(mesh, t);
    const auto dofs = space.local_dofs(t);
    for (std::size_t q = 0; q < hess_rule.size(); ++q) {
      const auto b = eval_local_basis(2, geom, reference_to_barycentric(hess_rule.points[q]));
      const double w = beta * hess_rule.weights[q] * 2.0 * geom.area;
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) a.add(dofs[i], dofs[j], w * frobenius(b.hessians[i], b.hessians[j]));
      }
    }
    for (std::size_t q = 0; q < mass_rule.size(); ++q) {
      const auto b = eval_local_basis(2, geom, reference_to_barycentric(mass_rule.points[q]));
      const double w = mass_rule.weights[q] * 2.0 * geom.area;
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) a.add(dofs[i], dofs[j], w * (b.values[i] * b.values[j]));
      }
    }
  }

  const auto edge_rule = interval_rule(4);
  for (const Edge& e : mesh.edges()) {
    if (e.boundary()) continue;
    const Point2 p0 = mesh.vertex(e.vertices[0]);
    const Point2 p1 = mesh.vertex(e.vertices[1]);
    const Point2 n = e.normal;
    const std::array<TriangleGeometry, 2> geom = {TriangleGeometry::of(mesh, e.triangles[0]),
                                                  TriangleGeometry::of(mesh, e.triangles[1])};
    std::array<Index, 12> dofs{};
    const auto d0 = space.local_dofs(e.triangles[0]);
    const auto d1 = space.local_dofs(e.triangles[1]);
    std::copy(d0.begin(), d0.end(), dofs.begin());
    std::copy(d1.begin(), d1.end(), dofs.begin() + 6);

    for (std::size_t q = 0; q < edge_rule.size(); ++q) {
      const Point2 x = p0 + edge_rule.points[q][0] * (p1 - p0);
      const double w = beta * edge_rule.weights[q] * e.length;
      // jump of dphi/dn and average of d2phi/dn2 for the 12 one-sided functions
      std::array<double, 12> jump{};
      std::array<double, 12> avg{};
      for (std::size_t side = 0; side < 2; ++side) {
        const auto b = eval_local_basis(2, geom[side], geom[side].barycentric(x));
        const double sign = side == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < 6; ++i) {
          jump[6 * side + i] = sign * dot(b.gradients[i], n);
          avg[6 * side + i] = 0.5 * normal_normal(b.hessians[i], n);
        }
      }
      const double penalty = sigma / e.length;
      for (std::size_t i = 0; i < 12; ++i) {
        if (dofs[i] < 0) continue;
        for (std::size_t j = 0; j < 12; ++j) {
          if (dofs[j] < 0) continue;
          const double value = penalty * (jump[i] * jump[j]) - (avg[i] * jump[j] + avg[j] * jump[i]);
          a.add(dofs[i], dofs[j], w * value);
        }
      }
    }
  }
  return a;
}

MixedOperator::MixedOperator(SparseSymMatrix mass, SparseSymMatrix stiffness, double beta, double inner_tol)
    : mass_(std::move(mass)), stiffness_(std::move(stiffness)), beta_(beta), inner_tol_(inner_tol) {
  if (mass_.size() != stiffness_.size()) throw InvalidArgument("mass and stiffness sizes differ");
  // beta K M_L^{-1} K + M
  const Index n = mass_.size();
  lumped_ = lumped_mass(mass_).diagonal_values();
  const auto& lumped = lumped_;
  const auto rp = stiffness_.row_ptr();
  const auto cols = stiffness_.cols();
  const auto vals = stiffness_.values();
  SparsityPattern pattern(n);
  std::vector<Index> row;
  for (Index i = 0; i < n; ++i) {
    row.clear();
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index mid = cols[static_cast<std::size_t>(k)];
      for (Index l = rp[static_cast<std::size_t>(mid)]; l < rp[static_cast<std::size_t>(mid) + 1]; ++l) {
        row.push_back(cols[static_cast<std::size_t>(l)]);
      }
    }
    for (Index j : row) pattern.add(i, j);
  }
  approximation_ = SparseSymMatrix(std::move(pattern));
  for (Index i = 0; i < n; ++i) {
    for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index mid = cols[static_cast<std::size_t>(k)];
      const double kim = vals[static_cast<std::size_t>(k)] / lumped[static_cast<std::size_t>(mid)];
      for (Index l = rp[static_cast<std::size_t>(mid)]; l < rp[static_cast<std::size_t>(mid) + 1]; ++l) {
        approximation_.add(i, cols[static_cast<std::size_t>(l)], beta_ * kim * vals[static_cast<std::size_t>(l)]);
      }
    }
    const auto mrp = mass_.row_ptr();
    for (Index k = mrp[static_cast<std::size_t>(i)]; k < mrp[static_cast<std::size_t>(i) + 1]; ++k) {
      approximation_.add(i, mass_.cols()[static_cast<std::size_t>(k)], mass_.values()[static_cast<std::size_t>(k)]);
    }
  }
}

Vector MixedOperator::control(std::span<const double> y) const {
  const Vector ky = stiffness_(y);
  return mass_solve(mass_, ky, inner_tol_);
}

void MixedOperator::apply(std::span<const double> x, std::span<double> y) const {
  const Vector u = control(x);
  const Vector ku = stiffness_(u);
  mass_.apply(x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += beta_ * ku[i];
}

bool MixedOperator::abs_apply(std::span<const double> x, std::span<double> y) const {
  Vector kx(x.size());
  stiffness_.abs_apply(x, kx);
  for (std::size_t i = 0; i < kx.size(); ++i) kx[i] /= lumped_[i];
  Vector kkx(x.size());
  stiffness_.abs_apply(kx, kkx);
  mass_.abs_apply(x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += beta_ * kkx[i];
  return true;
}

std::shared_ptr<MixedOperator> assemble_mixed(const FeSpace& space, const ProblemSpec& problem) {
  if (space.degree() != 1) throw InvalidArgument("assemble_mixed requires a degree-1 space");
  if (!(problem.beta > 0.0)) throw InvalidArgument("beta must be positive");
  SparseSymMatrix mass(element_pattern(space));
  SparseSymMatrix stiffness(element_pattern(space));
  assemble_volume(space, &mass, &stiffness);
  return std::make_shared<MixedOperator>(std::move(mass), std::move(stiffness), problem.beta);
}

Vector assemble_load(const FeSpace& space, const Field& y_d) {
  Vector f(static_cast<std::size_t>(space.size()), 0.0);
  const auto rule = triangle_rule(4);
  for (Index t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto geom = TriangleGeometry::of(space.mesh(), t);
    const auto dofs = space.local_dofs(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto lambda = reference_to_barycentric(rule.points[q]);
      const auto b = eval_local_basis(space.degree(), geom, lambda);
      const double w = rule.weights[q] * 2.0 * geom.area * y_d.value(geom.map(lambda));
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        if (dofs[i] >= 0) f[static_cast<std::size_t>(dofs[i])] += w * b.values[i];
      }
    }
  }
  return f;
}

double energy_norm(const LinearOperator& a, std::span<const double> v) {
  const Vector av = a(v);
  const double q = dot(v, av);
  if (q < -1e-12 * std::max(1.0, dot(v, v))) {
    throw CoercivityError("negative energy v^T A v = " + std::to_string(q) + ": penalty below coercivity threshold");
  }
  return std::sqrt(std::max(q, 0.0));
}

double energy_norm(const FeSpace& space, const ProblemSpec& problem, std::span<const double> v) {
  if (problem.method == Method::C0ip) return energy_norm(assemble_c0ip(space, problem), v);
  return energy_norm(*assemble_mixed(space, problem), v);
}

Vector discrete_laplacian(const FeSpace& space, std::span<const double> y, double tol) {
  Vector u = recover_control(space, y, tol);
  for (double& v : u) v = -v;
  return u;
}

Vector recover_control(const FeSpace& space, std::span<const double> state, double tol) {
  SparseSymMatrix mass(element_pattern(space));
  SparseSymMatrix stiffness(element_pattern(space));
  assemble_volume(space, &mass, &stiffness);
  return mass_solve(mass, stiffness(state), tol);
}

}  // namespace platevi
