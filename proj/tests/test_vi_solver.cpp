#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "platevi/harness.hpp"
#include "platevi/linalg.hpp"
#include "platevi/vi_solver.hpp"
#include "qp_instances.hpp"
#include "test_util.hpp"

namespace platevi {
namespace {

VIProblem scalar(double a, double f, double psi) {
  VIProblem p;
  p.op = std::make_shared<SparseSymMatrix>(SparseSymMatrix::diagonal(Vector{a}));
  p.load = {f};
  p.constraints = {{0, psi}};
  return p;
}

TEST(Pdas, ScalarActive) {
  const Solution s = solve_pdas(scalar(1.0, 2.0, 1.0));
  EXPECT_DOUBLE_EQ(s.state[0], 1.0);
  EXPECT_DOUBLE_EQ(s.multiplier[0], 1.0);
  EXPECT_EQ(s.active, std::vector<Index>{0});
}

TEST(Pdas, ScalarInactive) {
  const Solution s = solve_pdas(scalar(1.0, 0.5, 1.0));
  EXPECT_DOUBLE_EQ(s.state[0], 0.5);
  EXPECT_EQ(s.multiplier[0], 0.0);
  EXPECT_TRUE(s.active.empty());
}

TEST(Pdas, TieClassifiedInactive) {
  const Solution s = solve_pdas(scalar(1.0, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(s.state[0], 1.0);
  EXPECT_EQ(s.multiplier[0], 0.0);
  EXPECT_TRUE(s.active.empty());
}

TEST(Pdas, FlatObstacleCoarseMatchesOracle) {
  const Benchmark b = find_benchmark("flat-obstacle");
  const Discretization d = discretize(b.problem, test::square(4));
  const Solution pdas = solve_pdas(d.vi);
  OracleDiagnostics diag;
  const Solution oracle = qp_oracle(d.vi, &diag);
  EXPECT_TRUE(diag.enumerated);
  EXPECT_EQ(diag.candidates_passing, 1);
  EXPECT_FALSE(pdas.active.empty());
  EXPECT_LE(test::max_abs_diff(pdas.state, oracle.state), 1e-9);
  EXPECT_EQ(pdas.active, oracle.active);
}

TEST(Pdas, RandomQpsMatchOracle) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 30; ++k) {
    const VIProblem p = test::random_qp(rng);
    const Solution a = solve_pdas(p);
    const Solution b = qp_oracle(p);
    EXPECT_LE(test::max_abs_diff(a.state, b.state), 1e-8) << "instance " << k;
    EXPECT_TRUE(a.kkt.passes(p.pdas.kkt_tol));
  }
}

TEST(Oracle, AllSlackEqualsPlainSolve) {
  std::mt19937_64 rng(9);
  VIProblem p = test::random_qp(rng);
  for (auto& c : p.constraints) c.bound = 1e6;
  const Solution o = qp_oracle(p);
  EXPECT_TRUE(o.active.empty());
  EXPECT_LE(test::max_abs_diff(o.state, solve_spd(*p.op, p.load).x), 1e-10);
}

TEST(Oracle, EnumeratesEveryCandidateOnThreeConstraints) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    VIProblem p = test::random_qp(rng);
    p.constraints.resize(std::min<std::size_t>(3, p.constraints.size()));
    if (p.constraints.size() < 3) continue;
    OracleDiagnostics diag;
    (void)qp_oracle(p, &diag);
    EXPECT_TRUE(diag.enumerated);
    EXPECT_EQ(diag.candidates_checked, 8);
    EXPECT_EQ(diag.candidates_passing, 1);
  }
}

TEST(Oracle, LargeConstraintSetsUseDualIteration) {
  const Benchmark b = find_benchmark("flat-obstacle");
  const Discretization d = discretize(b.problem, test::square(6));
  ASSERT_GT(d.vi.constraints.size(), static_cast<std::size_t>(kOracleMaxEnumerated));
  OracleDiagnostics diag;
  const Solution o = qp_oracle(d.vi, &diag);
  EXPECT_FALSE(diag.enumerated);
  EXPECT_GT(diag.sweeps, 0);
  EXPECT_LE(test::max_abs_diff(o.state, solve_pdas(d.vi).state), 1e-8);
}

TEST(Kkt, HandBuiltPointAndPerturbation) {
  // A = diag(2, 1), f = (4, 0.5), y <= (1, 1): y = (1, 0.5), lambda = (2, 0)
  VIProblem p;
  p.op = std::make_shared<SparseSymMatrix>(SparseSymMatrix::diagonal(Vector{2.0, 1.0}));
  p.load = {4.0, 0.5};
  p.constraints = {{0, 1.0}, {1, 1.0}};
  Solution s;
  s.state = {1.0, 0.5};
  s.multiplier = {2.0, 0.0};
  s.active = {0};
  const KktReport r = kkt_report(p, s);
  EXPECT_LE(r.stationarity, 1e-14);
  EXPECT_LE(r.feasibility, 1e-14);
  EXPECT_LE(r.sign, 1e-14);
  EXPECT_LE(r.complementarity, 1e-14);
  EXPECT_EQ(r.support_violations, 0);
  EXPECT_TRUE(r.passes(1e-9));

  for (double delta : {1e-3, -1e-3}) {
    Solution bumped = s;
    bumped.state[0] += delta;
    const KktReport q = kkt_report(p, bumped);
    EXPECT_GE(std::max(q.feasibility, q.complementarity), 9e-4);
  }
  Solution stray = s;
  stray.multiplier[1] = 1e-3;
  EXPECT_EQ(kkt_report(p, stray).support_violations, 1);
}

TEST(Pdas, BenchmarksSatisfyKktWithNonnegativeMultipliers) {
  for (const Benchmark& b : constrained_benchmarks()) {
    for (Method m : {Method::C0ip, Method::Mixed}) {
      ProblemSpec p = b.problem;
      p.method = m;
      for (int n : b.n_values) {
        const MeshSolution ms = solve_on_mesh(p, n);
        const Solution& s = ms.solution;
        const VIProblem& vi = ms.disc.vi;
        EXPECT_LE(s.iterations, 30) << b.name << " " << to_string(m) << " n=" << n;
        EXPECT_LE(s.kkt.feasibility, 1e-10);
        EXPECT_LE(s.kkt.complementarity, 1e-10);
        EXPECT_LE(s.kkt.stationarity, 1e-9);
        const std::set<Index> active(s.active.begin(), s.active.end());
        const Vector ay = (*vi.op)(s.state);
        Vector residual(ay.size());
        for (std::size_t i = 0; i < ay.size(); ++i) residual[i] = ay[i] - vi.load[i];
        for (std::size_t k = 0; k < vi.constraints.size(); ++k) {
          const double lambda = s.multiplier[k];
          EXPECT_GE(lambda, 0.0);
          if (!active.contains(static_cast<Index>(k))) {
            EXPECT_EQ(lambda, 0.0);
          }
          residual[static_cast<std::size_t>(vi.constraints[k].dof)] += lambda;
        }
        EXPECT_LE(norm_inf(residual), 1e-9);
      }
    }
  }
}

// Plate obstacle problems have no comparison principle: raising psi shrinks
// the contact count but the sets need not be nested.
TEST(Pdas, RaisingObstacleShrinksActiveSet) {
  for (const Benchmark& b : constrained_benchmarks()) {
    for (Method m : {Method::C0ip, Method::Mixed}) {
      ProblemSpec p = b.problem;
      p.method = m;
      std::vector<std::size_t> sizes;
      for (double shift : {0.0, 0.01, 0.03}) {
        p.psi = b.problem.psi;
        p.psi.params[p.psi.name == "constant" ? "value" : "base"] += shift;
        const MeshSolution s = solve_on_mesh(p, 16);
        EXPECT_TRUE(s.solution.kkt.passes(1e-9));
        sizes.push_back(s.solution.active.size());
      }
      EXPECT_GE(sizes[0], sizes[1]) << b.name << " " << to_string(m);
      EXPECT_GE(sizes[1], sizes[2]) << b.name << " " << to_string(m);
      EXPECT_GT(sizes[0], sizes[2]) << b.name << " " << to_string(m);
    }
  }
}

TEST(Pdas, FlatObstacleContactSetsAreNotNested) {
  ProblemSpec p = find_benchmark("flat-obstacle").problem;
  p.psi = fields::constant(0.01);
  const MeshSolution low = solve_on_mesh(p, 16);
  p.psi = fields::constant(0.02);
  const MeshSolution high = solve_on_mesh(p, 16);
  const std::set<Index> below(low.solution.active.begin(), low.solution.active.end());
  int fresh = 0;
  for (Index a : high.solution.active) {
    if (below.contains(a)) continue;
    ++fresh;
    EXPECT_GT(high.solution.multiplier[static_cast<std::size_t>(a)], 1e-2);
    const Constraint& c = low.disc.vi.constraints[static_cast<std::size_t>(a)];
    EXPECT_GT(c.bound - low.solution.state[static_cast<std::size_t>(c.dof)], 1e-7);
  }
  EXPECT_EQ(fresh, 12);
  EXPECT_LT(high.solution.active.size(), low.solution.active.size());
}

TEST(Pdas, IterationCapRaises) {
  ProblemSpec p = find_benchmark("flat-obstacle").problem;
  PdasParams pdas;
  pdas.max_iter = 1;
  EXPECT_THROW(solve_on_mesh(p, 16, pdas), PdasError);
}

TEST(VIProblem, Validation) {
  VIProblem p = scalar(1.0, 1.0, 1.0);
  EXPECT_NO_THROW(p.validate());
  p.constraints.push_back({3, 1.0});
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = scalar(1.0, 1.0, 1.0);
  p.load.push_back(0.0);
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = scalar(1.0, 1.0, 1.0);
  p.pdas.c = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(VertexConstraints, OnePerInteriorVertex) {
  auto m = test::square(4);
  const FeSpace s = build_space(m, 2);
  const auto cons = vertex_constraints(s, make_field(fields::paraboloid(0.05, 0.5)));
  ASSERT_EQ(cons.size(), 9U);
  for (const Constraint& c : cons) {
    const Point2 x = s.dof_point(c.dof);
    EXPECT_EQ(s.dof_node(c.dof) < m->num_vertices(), true);
    EXPECT_NEAR(c.bound, 0.05 + 0.5 * ((x.x - 0.5) * (x.x - 0.5) + (x.y - 0.5) * (x.y - 0.5)), 1e-15);
  }
}

}  // namespace
}  // namespace platevi
