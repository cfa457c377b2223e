#include "platevi/space.hpp"

#include <string>

namespace platevi {

TriangleGeometry TriangleGeometry::of(const Mesh& mesh, Index t) {
  TriangleGeometry g;
  const auto& tri = mesh.triangle(t);
  for (int i = 0; i < 3; ++i) g.vertices[static_cast<std::size_t>(i)] = mesh.vertex(tri[static_cast<std::size_t>(i)]);
  const Point2 a = g.vertices[0];
  const Point2 b = g.vertices[1];
  const Point2 c = g.vertices[2];
  const double twice_area = cross(b - a, c - a);
  g.area = 0.5 * twice_area;
  // grad lambda_i = rot(opposite edge) / (2|T|), rotated clockwise for CCW triangles
  const auto grad = [twice_area](Point2 p, Point2 q) { return Point2{(p.y - q.y) / twice_area, (q.x - p.x) / twice_area}; };
  g.grad_lambda[0] = grad(b, c);
  g.grad_lambda[1] = grad(c, a);
  g.grad_lambda[2] = grad(a, b);
  return g;
}

Point2 TriangleGeometry::map(const std::array<double, 3>& lambda) const {
  return lambda[0] * vertices[0] + lambda[1] * vertices[1] + lambda[2] * vertices[2];
}

std::array<double, 3> TriangleGeometry::barycentric(Point2 p) const {
  const Point2 d = p - vertices[0];
  const double l1 = dot(grad_lambda[1], d);
  const double l2 = dot(grad_lambda[2], d);
  return {1.0 - l1 - l2, l1, l2};
}

namespace {

Hessian2 sym_outer(Point2 a, Point2 b, double scale) {
  return {scale * 2.0 * a.x * b.x, scale * (a.x * b.y + a.y * b.x), scale * 2.0 * a.y * b.y};
}

}  // namespace

BasisValues eval_local_basis(int degree, const TriangleGeometry& geom, const std::array<double, 3>& lambda) {
  BasisValues out;
  const auto& gl = geom.grad_lambda;
  if (degree == 1) {
    out.count = 3;
    for (std::size_t i = 0; i < 3; ++i) {
      out.values[i] = lambda[i];
      out.gradients[i] = gl[i];
      out.hessians[i] = {};
    }
    return out;
  }
  out.count = 6;
  for (std::size_t i = 0; i < 3; ++i) {
    out.values[i] = lambda[i] * (2.0 * lambda[i] - 1.0);
    out.gradients[i] = (4.0 * lambda[i] - 1.0) * gl[i];
    out.hessians[i] = sym_outer(gl[i], gl[i], 2.0);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3;
    const std::size_t k = (i + 2) % 3;
    out.values[3 + i] = 4.0 * lambda[j] * lambda[k];
    out.gradients[3 + i] = 4.0 * (lambda[k] * gl[j] + lambda[j] * gl[k]);
    out.hessians[3 + i] = sym_outer(gl[j], gl[k], 4.0);
  }
  return out;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree, BoundaryTreatment bc)
    : mesh_(std::move(mesh)), degree_(degree), bc_(bc) {
  if (!mesh_) throw InvalidArgument("build_space: null mesh");
  if (degree_ != 1 && degree_ != 2) {
    throw InvalidArgument("build_space: unsupported degree " + std::to_string(degree_) + " (expected 1 or 2)");
  }
  const Mesh& m = *mesh_;
  const Index nodes = m.num_vertices() + (degree_ == 2 ? m.num_edges() : 0);
  node_dof_.assign(static_cast<std::size_t>(nodes), -1);
  for (Index node = 0; node < nodes; ++node) {
    const bool on_boundary =
        node < m.num_vertices() ? m.boundary_vertex(node) : m.edge(node - m.num_vertices()).boundary();
    if (on_boundary && bc_ == BoundaryTreatment::Dirichlet) {
      boundary_nodes_.push_back(node);
      continue;
    }
    node_dof_[static_cast<std::size_t>(node)] = static_cast<Index>(dof_nodes_.size());
    dof_nodes_.push_back(node);
  }
  const auto ls = static_cast<std::size_t>(local_size());
  local_dofs_.resize(static_cast<std::size_t>(m.num_triangles()) * ls);
  for (Index t = 0; t < m.num_triangles(); ++t) {
    const auto nodes_t = local_nodes(t);
    for (std::size_t i = 0; i < ls; ++i) {
      local_dofs_[static_cast<std::size_t>(t) * ls + i] = node_dof_[static_cast<std::size_t>(nodes_t[i])];
    }
  }
}

std::array<Index, 6> FeSpace::local_nodes(Index t) const {
  const auto& tri = mesh_->triangle(t);
  std::array<Index, 6> nodes{tri[0], tri[1], tri[2], -1, -1, -1};
  if (degree_ == 2) {
    const auto& te = mesh_->triangle_edges(t);
    for (std::size_t i = 0; i < 3; ++i) nodes[3 + i] = mesh_->num_vertices() + te[i];
  }
  return nodes;
}

Point2 FeSpace::node_point(Index node) const {
  if (node < mesh_->num_vertices()) return mesh_->vertex(node);
  const Edge& e = mesh_->edge(node - mesh_->num_vertices());
  return 0.5 * (mesh_->vertex(e.vertices[0]) + mesh_->vertex(e.vertices[1]));
}

FeSpace build_space(std::shared_ptr<const Mesh> mesh, int degree, BoundaryTreatment bc) {
  return FeSpace(std::move(mesh), degree, bc);
}

BasisValues eval_basis(const FeSpace& space, Index t, Point2 p) {
  const auto geom = TriangleGeometry::of(space.mesh(), t);
  const auto lambda = geom.barycentric(p);
  for (double l : lambda) {
    if (l < -1e-12) throw InvalidArgument("eval_basis: point lies outside triangle " + std::to_string(t));
  }
  return eval_local_basis(space.degree(), geom, lambda);
}

Vector interpolate_nodal(const FeSpace& space, const ScalarFunction& f) {
  Vector coeffs(static_cast<std::size_t>(space.size()));
  for (Index i = 0; i < space.size(); ++i) coeffs[static_cast<std::size_t>(i)] = f(space.dof_point(i));
  return coeffs;
}

PointValue evaluate_local(const FeSpace& space, std::span<const double> coeffs, Index t,
                          const std::array<double, 3>& lambda) {
  const auto geom = TriangleGeometry::of(space.mesh(), t);
  const auto basis = eval_local_basis(space.degree(), geom, lambda);
  const auto dofs = space.local_dofs(t);
  PointValue out;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    if (dofs[i] < 0) continue;
    const double c = coeffs[static_cast<std::size_t>(dofs[i])];
    out.value += c * basis.values[i];
    out.gradient = out.gradient + c * basis.gradients[i];
    out.hessian.xx += c * basis.hessians[i].xx;
    out.hessian.xy += c * basis.hessians[i].xy;
    out.hessian.yy += c * basis.hessians[i].yy;
  }
  return out;
}

PointValue evaluate(const FeSpace& space, std::span<const double> coeffs, Index t, Point2 p) {
  const auto lambda = TriangleGeometry::of(space.mesh(), t).barycentric(p);
  return evaluate_local(space, coeffs, t, lambda);
}

Vector vertex_values(const FeSpace& space, std::span<const double> coeffs) {
  Vector out(static_cast<std::size_t>(space.mesh().num_vertices()), 0.0);
  for (Index v = 0; v < space.mesh().num_vertices(); ++v) {
    const Index d = space.vertex_dof(v);
    if (d >= 0) out[static_cast<std::size_t>(v)] = coeffs[static_cast<std::size_t>(d)];
  }
  return out;
}

}  // namespace platevi
