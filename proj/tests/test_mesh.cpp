#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "platevi/harness.hpp"
#include "platevi/mesh.hpp"
#include "platevi/space.hpp"
#include "test_util.hpp"

namespace platevi {
namespace {

int interior_edges(const Mesh& m) {
  return static_cast<int>(std::count_if(m.edges().begin(), m.edges().end(), [](const Edge& e) { return !e.boundary(); }));
}

TEST(Mesh, SingleCell) {
  const Mesh m = unit_square_mesh(1);
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_triangles(), 2);
  EXPECT_EQ(m.num_edges(), 5);
  EXPECT_EQ(interior_edges(m), 1);
}

TEST(Mesh, TwoByTwo) {
  const Mesh m = unit_square_mesh(2);
  EXPECT_EQ(m.num_vertices(), 9);
  EXPECT_EQ(m.num_triangles(), 8);
  EXPECT_EQ(m.num_edges(), 16);
  EXPECT_EQ(interior_edges(m), 8);
}

TEST(Mesh, EulerAndCounts) {
  for (int n = 1; n <= 12; ++n) {
    const Mesh m = unit_square_mesh(n);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
    EXPECT_EQ(m.num_edges(), 3 * n * n + 2 * n);
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_triangles(), 1) << "n=" << n;
  }
}

TEST(Mesh, Invariants) {
  for (const Mesh& m : {unit_square_mesh(5), uniform_refine(unit_square_mesh(3))}) {
    for (Index t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.area(t), 0.0);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
    std::vector<int> uses(static_cast<std::size_t>(m.num_edges()), 0);
    for (Index t = 0; t < m.num_triangles(); ++t) {
      for (Index e : m.triangle_edges(t)) ++uses[static_cast<std::size_t>(e)];
    }
    for (Index e = 0; e < m.num_edges(); ++e) {
      EXPECT_EQ(uses[static_cast<std::size_t>(e)], m.edge(e).boundary() ? 1 : 2);
    }
  }
}

TEST(Mesh, DiagonalLowerLeftToUpperRight) {
  const Mesh m = unit_square_mesh(3);
  for (Index e = 0; e < m.num_edges(); ++e) {
    const Point2 d = m.vertex(m.edge(e).vertices[1]) - m.vertex(m.edge(e).vertices[0]);
    if (std::abs(d.x) > 1e-14 && std::abs(d.y) > 1e-14) {
      EXPECT_GT(d.x * d.y, 0.0);
    }
  }
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(unit_square_mesh(0), InvalidArgument);
  EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}), InvalidArgument);
  EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 5}}), InvalidArgument);
}

using TriangleKey = std::set<std::pair<double, double>>;

std::set<TriangleKey> triangle_set(const Mesh& m) {
  std::set<TriangleKey> out;
  for (const Triangle& t : m.triangles()) {
    TriangleKey k;
    for (Index v : t) k.insert({m.vertex(v).x, m.vertex(v).y});
    out.insert(k);
  }
  return out;
}

TEST(Refine, OneCellRefinedMatchesTwoByTwo) {
  const Mesh fine = uniform_refine(unit_square_mesh(1));
  const Mesh direct = unit_square_mesh(2);
  EXPECT_EQ(fine.num_vertices(), direct.num_vertices());
  EXPECT_EQ(fine.num_edges(), direct.num_edges());
  EXPECT_EQ(triangle_set(fine), triangle_set(direct));
}

TEST(Refine, CountsAreaAndDiameter) {
  for (int n : {1, 2, 3, 5}) {
    const Mesh m = unit_square_mesh(n);
    const Mesh f = uniform_refine(m);
    const Mesh ff = uniform_refine(f);
    EXPECT_EQ(f.num_triangles(), 8 * n * n);
    if ((n & (n - 1)) == 0) {
      EXPECT_EQ(ff.h(), m.h() / 4.0);
    } else {
      EXPECT_DOUBLE_EQ(ff.h(), m.h() / 4.0);
    }
    EXPECT_NEAR(f.total_area(), m.total_area(), 1e-14);
    EXPECT_TRUE(ff.refines(m));
    EXPECT_TRUE(ff.refines(f));
    EXPECT_FALSE(m.refines(f));
  }
  EXPECT_FALSE(unit_square_mesh(4).refines(unit_square_mesh(2)));
}

TEST(Refine, NestedQuadraticsAgreeAtRandomPoints) {
  auto coarse_mesh = test::square(3);
  auto fine_mesh = std::make_shared<const Mesh>(uniform_refine(*coarse_mesh));
  const FeSpace coarse = build_space(coarse_mesh, 2, BoundaryTreatment::None);
  const FeSpace fine = build_space(fine_mesh, 2, BoundaryTreatment::None);
  std::mt19937_64 rng(7);
  const Vector c = test::random_vector(rng, static_cast<std::size_t>(coarse.size()));
  const Vector f = prolongate(coarse, c, fine);
  for (int k = 0; k < 1000; ++k) {
    const Point2 p = test::random_point(rng);
    const Index tc = *coarse_mesh->find_triangle(p);
    const Index tf = *fine_mesh->find_triangle(p);
    EXPECT_NEAR(evaluate(coarse, c, tc, p).value, evaluate(fine, f, tf, p).value, 1e-13);
  }
}

TEST(EdgeFrame, InteriorNormalPointsFromFirstToSecond) {
  const Mesh m = unit_square_mesh(4);
  auto centroid = [&](Index t) {
    const auto& tri = m.triangle(t);
    return (1.0 / 3.0) * (m.vertex(tri[0]) + m.vertex(tri[1]) + m.vertex(tri[2]));
  };
  for (Index e = 0; e < m.num_edges(); ++e) {
    const EdgeFrame f = edge_trace_frame(m, e);
    const Point2 a = m.vertex(m.edge(e).vertices[0]);
    const Point2 b = m.vertex(m.edge(e).vertices[1]);
    EXPECT_NEAR(norm(f.normal), 1.0, 1e-15);
    EXPECT_LE(std::abs(dot(f.normal, b - a)), 1e-14);
    EXPECT_EQ(f.side_sign(f.triangles[0]), 1.0);
    if (m.edge(e).boundary()) {
      EXPECT_GT(dot(f.normal, 0.5 * (a + b) - Point2{0.5, 0.5}), 0.0);
    } else {
      EXPECT_LT(f.triangles[0], f.triangles[1]);
      EXPECT_GT(dot(f.normal, centroid(f.triangles[1]) - centroid(f.triangles[0])), 0.0);
      EXPECT_EQ(f.side_sign(f.triangles[1]), -1.0);
    }
  }
  EXPECT_THROW(edge_trace_frame(m, m.num_edges()), InvalidArgument);
}

TEST(EdgeFrame, LengthIndependentOfVertexOrder) {
  const std::vector<Point2> v{{0, 0}, {2, 0}, {0.5, 1.5}, {2.5, 1.0}};
  const Mesh a(v, {{0, 1, 2}, {1, 3, 2}});
  const Mesh b(v, {{2, 0, 1}, {3, 2, 1}});
  auto length_of = [](const Mesh& m, Index p, Index q) {
    for (const Edge& e : m.edges()) {
      if (std::minmax(e.vertices[0], e.vertices[1]) == std::minmax(p, q)) return e.length;
    }
    return -1.0;
  };
  EXPECT_EQ(length_of(a, 1, 2), length_of(b, 2, 1));
  EXPECT_DOUBLE_EQ(length_of(a, 1, 2), std::hypot(1.5, 1.5));
}

}  // namespace
}  // namespace platevi
