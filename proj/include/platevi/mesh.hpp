#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "platevi/common.hpp"

namespace platevi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);

using Triangle = std::array<Index, 3>;

/// Mesh edge. Vertices are stored in ascending order. triangles[0] is the
/// adjacent triangle of smaller index; triangles[1] is -1 on the boundary.
/// The unit normal points out of triangles[0].
struct Edge {
  std::array<Index, 2> vertices{};
  std::array<Index, 2> triangles{-1, -1};
  Point2 normal;
  double length = 0.0;

  [[nodiscard]] bool boundary() const noexcept { return triangles[1] < 0; }
};

/// Jump/average orientation for one edge.
///
/// The jump of a piecewise function across the edge is the trace from
/// triangles[0] minus the trace from triangles[1]; on a boundary edge it is
/// the single trace. The average is the arithmetic mean of the two traces.
/// `tangent` is `normal` rotated counterclockwise by 90 degrees;
/// `orientation` is +1 when that tangent runs from edge vertex 0 to vertex 1.
struct EdgeFrame {
  Point2 normal;
  Point2 tangent;
  std::array<Index, 2> triangles{-1, -1};
  int orientation = 1;

  /// +1 for triangles[0], -1 for triangles[1].
  [[nodiscard]] double side_sign(Index triangle) const;
};

/// Conforming triangulation of a polygon with counterclockwise triangles.
///
/// Immutable after construction. Meshes produced by uniform_refine remember
/// their lineage so nested comparisons can be validated: the children of
/// coarse triangle t are fine triangles 4t..4t+3.
class Mesh {
 public:
  Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles);

  [[nodiscard]] std::span<const Point2> vertices() const noexcept { return vertices_; }
  [[nodiscard]] std::span<const Triangle> triangles() const noexcept { return triangles_; }
  [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }

  [[nodiscard]] Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
  [[nodiscard]] Index num_triangles() const noexcept { return static_cast<Index>(triangles_.size()); }
  [[nodiscard]] Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }

  [[nodiscard]] const Point2& vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] const Triangle& triangle(Index t) const { return triangles_[static_cast<std::size_t>(t)]; }
  [[nodiscard]] const Edge& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }

  /// Local edge k of a triangle is the one opposite local vertex k.
  [[nodiscard]] const std::array<Index, 3>& triangle_edges(Index t) const {
    return triangle_edges_[static_cast<std::size_t>(t)];
  }

  [[nodiscard]] bool boundary_vertex(Index v) const { return boundary_vertex_[static_cast<std::size_t>(v)] != 0; }
  [[nodiscard]] double area(Index t) const { return areas_[static_cast<std::size_t>(t)]; }
  [[nodiscard]] double diameter(Index t) const { return diameters_[static_cast<std::size_t>(t)]; }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] double total_area() const;

  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] std::uint64_t lineage() const noexcept { return lineage_; }

  /// True if this mesh was produced from `coarse` by one or more uniform refinements.
  [[nodiscard]] bool refines(const Mesh& coarse) const;

  /// Brute-force point location; returns a triangle containing p (closed, with tolerance).
  [[nodiscard]] std::optional<Index> find_triangle(Point2 p, double tol = 1e-12) const;

  [[nodiscard]] std::array<double, 3> barycentric(Index t, Point2 p) const;

 private:
  friend Mesh uniform_refine(const Mesh& coarse);

  void build_edges();

  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 3>> triangle_edges_;
  std::vector<char> boundary_vertex_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double h_ = 0.0;
  int level_ = 0;
  std::uint64_t lineage_ = 0;
};

/// Barycentric coordinates (in the parent) of the three vertices of child k
/// produced by uniform_refine.
extern const std::array<std::array<std::array<double, 3>, 3>, 4> kChildVertexBarycentric;

/// Uniform grid on (0,1)^2 with n cells per side, every cell split along its
/// lower-left to upper-right diagonal.
Mesh unit_square_mesh(int n);

/// Red refinement: every triangle is split into four congruent children
/// through its edge midpoints. Vertex i of the coarse mesh keeps index i; the
/// midpoint of coarse edge e becomes vertex num_vertices + e.
Mesh uniform_refine(const Mesh& coarse);

EdgeFrame edge_trace_frame(const Mesh& mesh, Index edge);

}  // namespace platevi
