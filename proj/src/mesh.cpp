#include "platevi/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <tuple>

namespace platevi {

double norm(Point2 a) { return std::hypot(a.x, a.y); }

double EdgeFrame::side_sign(Index triangle) const {
  if (triangle == triangles[0]) return 1.0;
  if (triangle == triangles[1] && triangle >= 0) return -1.0;
  throw InvalidArgument("triangle " + std::to_string(triangle) + " is not adjacent to this edge");
}

namespace {

std::uint64_t fnv1a(std::uint64_t hash, std::uint64_t word) {
  for (int byte = 0; byte < 8; ++byte) {
    hash ^= (word >> (8 * byte)) & 0xffU;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fingerprint(const std::vector<Point2>& vertices, const std::vector<Triangle>& triangles) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& p : vertices) {
    hash = fnv1a(hash, std::bit_cast<std::uint64_t>(p.x));
    hash = fnv1a(hash, std::bit_cast<std::uint64_t>(p.y));
  }
  for (const auto& t : triangles) {
    for (Index v : t) hash = fnv1a(hash, static_cast<std::uint64_t>(v));
  }
  return hash;
}

}  // namespace

Mesh::Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw InvalidArgument("mesh has no triangles");
  const auto nv = static_cast<Index>(vertices_.size());
  areas_.reserve(triangles_.size());
  diameters_.reserve(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (Index v : tri) {
      if (v < 0 || v >= nv) throw InvalidArgument("triangle " + std::to_string(t) + " references a missing vertex");
    }
    const Point2 a = vertices_[static_cast<std::size_t>(tri[0])];
    const Point2 b = vertices_[static_cast<std::size_t>(tri[1])];
    const Point2 c = vertices_[static_cast<std::size_t>(tri[2])];
    const double area = 0.5 * cross(b - a, c - a);
    if (!(area > 0.0)) {
      throw InvalidArgument("triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
    areas_.push_back(area);
    const double diam = std::max({norm(b - a), norm(c - b), norm(a - c)});
    diameters_.push_back(diam);
    h_ = std::max(h_, diam);
  }
  build_edges();
  lineage_ = fingerprint(vertices_, triangles_);
}

void Mesh::build_edges() {
  // (v_lo, v_hi, triangle, local edge index)
  std::vector<std::tuple<Index, Index, Index, int>> halves;
  halves.reserve(3 * triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const Index a = tri[static_cast<std::size_t>((k + 1) % 3)];
      const Index b = tri[static_cast<std::size_t>((k + 2) % 3)];
      halves.emplace_back(std::min(a, b), std::max(a, b), static_cast<Index>(t), k);
    }
  }
  std::sort(halves.begin(), halves.end());

  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  boundary_vertex_.assign(vertices_.size(), 0);
  for (std::size_t i = 0; i < halves.size();) {
    std::size_t j = i + 1;
    while (j < halves.size() && std::get<0>(halves[j]) == std::get<0>(halves[i]) &&
           std::get<1>(halves[j]) == std::get<1>(halves[i])) {
      ++j;
    }
    if (j - i > 2) throw InvalidArgument("edge shared by more than two triangles");

    Edge edge;
    edge.vertices = {std::get<0>(halves[i]), std::get<1>(halves[i])};
    edge.triangles[0] = std::get<2>(halves[i]);
    if (j - i == 2) edge.triangles[1] = std::get<2>(halves[i + 1]);

    const Point2 p0 = vertices_[static_cast<std::size_t>(edge.vertices[0])];
    const Point2 p1 = vertices_[static_cast<std::size_t>(edge.vertices[1])];
    const Point2 d = p1 - p0;
    edge.length = norm(d);
    Point2 n{d.y / edge.length, -d.x / edge.length};
    // orient out of triangles[0]: away from its vertex opposite this edge
    const int local = std::get<3>(halves[i]);
    const Point2 opposite =
        vertices_[static_cast<std::size_t>(triangles_[static_cast<std::size_t>(edge.triangles[0])][static_cast<std::size_t>(local)])];
    if (dot(n, opposite - p0) > 0.0) n = -1.0 * n;
    edge.normal = n;

    const auto id = static_cast<Index>(edges_.size());
    for (std::size_t k = i; k < j; ++k) {
      triangle_edges_[static_cast<std::size_t>(std::get<2>(halves[k]))][static_cast<std::size_t>(std::get<3>(halves[k]))] = id;
    }
    if (edge.boundary()) {
      boundary_vertex_[static_cast<std::size_t>(edge.vertices[0])] = 1;
      boundary_vertex_[static_cast<std::size_t>(edge.vertices[1])] = 1;
    }
    edges_.push_back(edge);
    i = j;
  }
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

bool Mesh::refines(const Mesh& coarse) const {
  if (lineage_ != coarse.lineage_ || level_ <= coarse.level_) return false;
  std::size_t expected = coarse.triangles_.size();
  for (int l = coarse.level_; l < level_; ++l) expected *= 4;
  return expected == triangles_.size();
}

std::array<double, 3> Mesh::barycentric(Index t, Point2 p) const {
  const auto& tri = triangle(t);
  const Point2 a = vertex(tri[0]);
  const Point2 b = vertex(tri[1]);
  const Point2 c = vertex(tri[2]);
  const double twice_area = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / twice_area;
  const double l2 = cross(b - a, p - a) / twice_area;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<Index> Mesh::find_triangle(Point2 p, double tol) const {
  for (Index t = 0; t < num_triangles(); ++t) {
    const auto l = barycentric(t, p);
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return t;
  }
  return std::nullopt;
}

const std::array<std::array<std::array<double, 3>, 3>, 4> kChildVertexBarycentric = {{
    {{{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}}},
    {{{0.5, 0.5, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.5, 0.5}}},
    {{{0.5, 0.0, 0.5}, {0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}}},
    {{{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}},
}};

Mesh unit_square_mesh(int n) {
  if (n < 1) throw InvalidArgument("unit_square_mesh: n must be >= 1, got " + std::to_string(n));
  const int m = n + 1;
  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>(m * m));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index ll = j * m + i;
      const Index lr = ll + 1;
      const Index ul = ll + m;
      const Index ur = ul + 1;
      triangles.push_back({ll, lr, ur});
      triangles.push_back({ll, ur, ul});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

Mesh uniform_refine(const Mesh& coarse) {
  const Index nv = coarse.num_vertices();
  std::vector<Point2> vertices(coarse.vertices().begin(), coarse.vertices().end());
  vertices.reserve(static_cast<std::size_t>(nv + coarse.num_edges()));
  for (const Edge& e : coarse.edges()) {
    vertices.push_back(0.5 * (coarse.vertex(e.vertices[0]) + coarse.vertex(e.vertices[1])));
  }
  std::vector<Triangle> triangles;
  triangles.reserve(4 * static_cast<std::size_t>(coarse.num_triangles()));
  for (Index t = 0; t < coarse.num_triangles(); ++t) {
    const auto& [a, b, c] = coarse.triangle(t);
    const auto& te = coarse.triangle_edges(t);
    const Index m_bc = nv + te[0];
    const Index m_ca = nv + te[1];
    const Index m_ab = nv + te[2];
    triangles.push_back({a, m_ab, m_ca});
    triangles.push_back({m_ab, b, m_bc});
    triangles.push_back({m_ca, m_bc, c});
    triangles.push_back({m_bc, m_ca, m_ab});
  }
  Mesh fine(std::move(vertices), std::move(triangles));
  fine.level_ = coarse.level_ + 1;
  fine.lineage_ = coarse.lineage_;
  return fine;
}

EdgeFrame edge_trace_frame(const Mesh& mesh, Index edge) {
  if (edge < 0 || edge >= mesh.num_edges()) {
    throw InvalidArgument("edge index " + std::to_string(edge) + " out of range");
  }
  const Edge& e = mesh.edge(edge);
  EdgeFrame frame;
  frame.normal = e.normal;
  frame.tangent = {-e.normal.y, e.normal.x};
  frame.triangles = e.triangles;
  const Point2 d = mesh.vertex(e.vertices[1]) - mesh.vertex(e.vertices[0]);
  frame.orientation = dot(frame.tangent, d) > 0.0 ? 1 : -1;
  return frame;
}

}  // namespace platevi
