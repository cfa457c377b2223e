#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "platevi/common.hpp"
#include "platevi/mesh.hpp"

namespace platevi {

/// Symmetric 2x2 matrix, used for Hessians.
struct Hessian2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// Frobenius inner product A:B.
inline double frobenius(const Hessian2& a, const Hessian2& b) {
  return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

/// n^T H n
inline double normal_normal(const Hessian2& h, Point2 n) {
  return h.xx * n.x * n.x + 2.0 * h.xy * n.x * n.y + h.yy * n.y * n.y;
}

/// Affine data of one triangle: vertices and the constant gradients of the
/// barycentric coordinates.
struct TriangleGeometry {
  std::array<Point2, 3> vertices;
  std::array<Point2, 3> grad_lambda;
  double area = 0.0;

  static TriangleGeometry of(const Mesh& mesh, Index t);

  [[nodiscard]] Point2 map(const std::array<double, 3>& lambda) const;
  [[nodiscard]] std::array<double, 3> barycentric(Point2 p) const;
};

/// Values and physical derivatives of every local shape function at one point.
struct BasisValues {
  int count = 0;
  std::array<double, 6> values{};
  std::array<Point2, 6> gradients{};
  std::array<Hessian2, 6> hessians{};
};

/// Lagrange shape functions on one triangle. Degree 1: lambda_i. Degree 2:
/// vertex functions lambda_i(2 lambda_i - 1) (local 0..2) followed by edge
/// functions 4 lambda_j lambda_k for the edge opposite vertex i (local 3+i).
BasisValues eval_local_basis(int degree, const TriangleGeometry& geom, const std::array<double, 3>& lambda);

enum class BoundaryTreatment {
  Dirichlet,  // nodes on the boundary are eliminated (homogeneous H^1_0 trace)
  None,       // every node is a degree of freedom
};

/// Continuous Lagrange space of degree 1 or 2 over a mesh.
///
/// Nodes are numbered vertices first, then edge midpoints (degree 2:
/// node num_vertices + e for edge e). Free degrees of freedom are the
/// non-eliminated nodes in node order.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree, BoundaryTreatment bc);

  [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] BoundaryTreatment boundary_treatment() const noexcept { return bc_; }
  [[nodiscard]] int local_size() const noexcept { return degree_ == 1 ? 3 : 6; }

  /// Number of free degrees of freedom.
  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(dof_nodes_.size()); }
  [[nodiscard]] Index num_nodes() const noexcept { return static_cast<Index>(node_dof_.size()); }

  /// Global dof of each local shape function of triangle t, -1 if eliminated.
  [[nodiscard]] std::span<const Index> local_dofs(Index t) const {
    return {local_dofs_.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(local_size()),
            static_cast<std::size_t>(local_size())};
  }
  /// Node index of each local shape function of triangle t.
  [[nodiscard]] std::array<Index, 6> local_nodes(Index t) const;

  /// Dof owned by mesh vertex v, or -1 when v lies on the eliminated boundary.
  [[nodiscard]] Index vertex_dof(Index v) const { return node_dof_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] std::span<const Index> vertex_dof_map() const {
    return {node_dof_.data(), static_cast<std::size_t>(mesh_->num_vertices())};
  }
  [[nodiscard]] Index node_dof(Index node) const { return node_dof_[static_cast<std::size_t>(node)]; }
  [[nodiscard]] Index dof_node(Index dof) const { return dof_nodes_[static_cast<std::size_t>(dof)]; }
  [[nodiscard]] std::span<const Index> boundary_nodes() const noexcept { return boundary_nodes_; }

  [[nodiscard]] Point2 node_point(Index node) const;
  [[nodiscard]] Point2 dof_point(Index dof) const { return node_point(dof_node(dof)); }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  BoundaryTreatment bc_;
  std::vector<Index> local_dofs_;
  std::vector<Index> node_dof_;
  std::vector<Index> dof_nodes_;
  std::vector<Index> boundary_nodes_;
};

FeSpace build_space(std::shared_ptr<const Mesh> mesh, int degree,
                    BoundaryTreatment bc = BoundaryTreatment::Dirichlet);

/// Shape functions of triangle t at a physical point. Throws if the point is
/// outside the closed triangle by more than 1e-12 in barycentric coordinates.
BasisValues eval_basis(const FeSpace& space, Index t, Point2 p);

using ScalarFunction = std::function<double(Point2)>;

/// Nodal interpolant: coefficient i is f at the node of free dof i.
Vector interpolate_nodal(const FeSpace& space, const ScalarFunction& f);

/// Value, gradient and Hessian of a finite element function at one point of triangle t.
struct PointValue {
  double value = 0.0;
  Point2 gradient;
  Hessian2 hessian;
};
PointValue evaluate_local(const FeSpace& space, std::span<const double> coeffs, Index t,
                          const std::array<double, 3>& lambda);
PointValue evaluate(const FeSpace& space, std::span<const double> coeffs, Index t, Point2 p);

/// Value of a finite element function at each mesh vertex (zero at eliminated nodes).
Vector vertex_values(const FeSpace& space, std::span<const double> coeffs);

}  // namespace platevi
