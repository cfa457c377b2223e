#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "platevi/assembly.hpp"
#include "platevi/linalg.hpp"
#include "test_util.hpp"

namespace platevi {
namespace {

// Textbook elimination: substitute the fixed values, eliminate the free block.
Vector eliminate(const DenseMatrix& a, const Vector& b, const FixedValues& fixed) {
  const Index n = a.rows();
  std::vector<Index> free;
  for (Index i = 0; i < n; ++i) {
    if (!fixed.contains(i)) free.push_back(i);
  }
  const auto m = free.size();
  std::vector<std::vector<double>> aug(m, std::vector<double>(m + 1));
  for (std::size_t r = 0; r < m; ++r) {
    double rhs = b[static_cast<std::size_t>(free[r])];
    for (const auto& [j, v] : fixed) rhs -= a(free[r], j) * v;
    for (std::size_t c = 0; c < m; ++c) aug[r][c] = a(free[r], free[c]);
    aug[r][m] = rhs;
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = k + 1; r < m; ++r) {
      const double f = aug[r][k] / aug[k][k];
      for (std::size_t c = k; c <= m; ++c) aug[r][c] -= f * aug[k][c];
    }
  }
  Vector xf(m);
  for (std::size_t k = m; k-- > 0;) {
    double s = aug[k][m];
    for (std::size_t c = k + 1; c < m; ++c) s -= aug[k][c] * xf[c];
    xf[k] = s / aug[k][k];
  }
  Vector x(static_cast<std::size_t>(n));
  for (const auto& [j, v] : fixed) x[static_cast<std::size_t>(j)] = v;
  for (std::size_t r = 0; r < m; ++r) x[static_cast<std::size_t>(free[r])] = xf[r];
  return x;
}

// B^T B + n I, stored in a full pattern.
SparseSymMatrix random_spd(std::mt19937_64& rng, Index n) {
  const Vector b = test::random_vector(rng, static_cast<std::size_t>(n * n));
  SparsityPattern pattern(n);
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  pattern.add_clique(all);
  SparseSymMatrix a(std::move(pattern));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double s = i == j ? n : 0.0;
      for (Index k = 0; k < n; ++k) s += b[static_cast<std::size_t>(k * n + i)] * b[static_cast<std::size_t>(k * n + j)];
      a.add(i, j, s);
    }
  }
  return a;
}

TEST(SolveSpd, ScaledIdentityConvergesWithinDimension) {
  std::mt19937_64 rng(1);
  const Vector d = test::random_vector(rng, 40, 0.5, 2.0);
  const SparseSymMatrix a = SparseSymMatrix::diagonal(d);
  const Vector b = test::random_vector(rng, 40);
  SolveOptions o;
  o.method = SolveMethod::ConjugateGradient;
  const SolveResult r = solve_spd(a, b, o);
  EXPECT_LE(r.report.relative_residual, o.tol);
  EXPECT_LE(r.report.iterations, 40);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x[i], b[i] / d[i], 1e-12);
}

TEST(SolveSpd, ZeroRightHandSide) {
  const SparseSymMatrix a = SparseSymMatrix::diagonal(Vector(10, 3.0));
  const Vector b(10, 0.0);
  for (SolveMethod m : {SolveMethod::ConjugateGradient, SolveMethod::Direct}) {
    SolveOptions o;
    o.method = m;
    for (double v : solve_spd(a, b, o).x) EXPECT_EQ(v, 0.0);
  }
}

TEST(SolveSpd, ReportedResidualIsRecomputable) {
  const FeSpace s = build_space(test::square(8), 2);
  ProblemSpec p;
  const SparseSymMatrix a = assemble_c0ip(s, p);
  const Vector f = assemble_load(s, make_field(fields::manufactured_rhs(1.0)));
  for (SolveMethod m : {SolveMethod::ConjugateGradient, SolveMethod::Direct}) {
    SolveOptions o;
    o.method = m;
    const SolveResult r = solve_spd(a, f, o);
    const Vector ax = a(r.x);
    Vector res(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) res[i] = f[i] - ax[i];
    EXPECT_NEAR(norm2(res) / norm2(f), r.report.relative_residual, 1e-14);
    EXPECT_LE(r.report.relative_residual, 1e-10);
  }
}

TEST(SolveSpd, RejectsIndefinite) {
  const SparseSymMatrix a = SparseSymMatrix::diagonal(Vector{1.0, -1.0, 2.0});
  const Vector b{1.0, 1.0, 1.0};
  for (SolveMethod m : {SolveMethod::ConjugateGradient, SolveMethod::Direct}) {
    SolveOptions o;
    o.method = m;
    EXPECT_THROW(solve_spd(a, b, o), SolverError);
  }
}

TEST(SolveConstrained, AllFixed) {
  std::mt19937_64 rng(2);
  const SparseSymMatrix a = random_spd(rng, 6);
  const Vector b = test::random_vector(rng, 6);
  FixedValues fixed;
  for (Index i = 0; i < 6; ++i) fixed[i] = 0.5 * i - 1.0;
  for (SolveMethod m : {SolveMethod::ConjugateGradient, SolveMethod::Direct}) {
    SolveOptions o;
    o.method = m;
    const SolveResult r = solve_constrained(a, b, fixed, o);
    EXPECT_EQ(r.report.iterations, 0);
    for (const auto& [i, v] : fixed) EXPECT_EQ(r.x[static_cast<std::size_t>(i)], v);
  }
}

TEST(SolveConstrained, NoneFixedEqualsUnconstrained) {
  std::mt19937_64 rng(3);
  const SparseSymMatrix a = random_spd(rng, 12);
  const Vector b = test::random_vector(rng, 12);
  for (SolveMethod m : {SolveMethod::ConjugateGradient, SolveMethod::Direct}) {
    SolveOptions o;
    o.method = m;
    EXPECT_EQ(solve_constrained(a, b, {}, o).x, solve_spd(a, b, o).x);
  }
}

TEST(SolveConstrained, MatchesDenseElimination) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseSymMatrix a = random_spd(rng, 20);
    const Vector b = test::random_vector(rng, 20);
    FixedValues fixed;
    std::uniform_int_distribution<Index> pick(0, 19);
    while (fixed.size() < 5) fixed[pick(rng)] = test::random_vector(rng, 1)[0];
    const Vector oracle = eliminate(densify(a), b, fixed);
    for (SolveMethod m : {SolveMethod::ConjugateGradient, SolveMethod::Direct}) {
      SolveOptions o;
      o.method = m;
      EXPECT_LE(test::max_abs_diff(solve_constrained(a, b, fixed, o).x, oracle), 1e-10);
    }
    ConstrainedSolver reuse(a, {});
    EXPECT_LE(test::max_abs_diff(reuse.solve(b, fixed).x, oracle), 1e-10);
    EXPECT_LE(test::max_abs_diff(reuse.solve(b, {}).x, eliminate(densify(a), b, {})), 1e-10);
  }
}

TEST(ConjugateGradient, ErrorEnergyNonIncreasing) {
  std::mt19937_64 rng(5);
  const SparseSymMatrix a = random_spd(rng, 30);
  const Vector b = test::random_vector(rng, 30);
  const Vector exact = eliminate(densify(a), b, {});
  for (Preconditioner pc : {Preconditioner::None, Preconditioner::Jacobi}) {
    std::vector<double> energy;
    SolveOptions o;
    o.method = SolveMethod::ConjugateGradient;
    o.preconditioner = pc;
    o.tol = 1e-14;
    o.on_iterate = [&](std::span<const double> x) {
      Vector e(x.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = x[i] - exact[i];
      energy.push_back(a.form(e, e));
    };
    (void)solve_spd(a, b, o);
    ASSERT_GT(energy.size(), 2U);
    for (std::size_t k = 1; k < energy.size(); ++k) EXPECT_LE(energy[k], energy[k - 1] * (1.0 + 1e-12) + 1e-28);
  }
}

TEST(ConjugateGradient, BitwiseDeterministicIterates) {
  const FeSpace s = build_space(test::square(8), 1);
  ProblemSpec p;
  p.method = Method::Mixed;
  const auto op = assemble_mixed(s, p);
  const Vector f = assemble_load(s, make_field(fields::sinsin(1.0)));
  auto run = [&] {
    std::vector<Vector> iterates;
    SolveOptions o;
    o.on_iterate = [&](std::span<const double> x) { iterates.emplace_back(x.begin(), x.end()); };
    const SolveResult r = solve_spd(*op, f, o);
    iterates.push_back(r.x);
    return iterates;
  };
  const auto first = run();
  EXPECT_GT(first.size(), 1U);
  EXPECT_EQ(first, run());
}

TEST(Dense, SolveAndSingular) {
  DenseMatrix a(2, 2);
  a(0, 0) = 0.0, a(0, 1) = 2.0, a(1, 0) = 1.0, a(1, 1) = 1.0;
  const Vector x = dense_solve(a, {4.0, 3.0});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 2.0, 1e-15);
  DenseMatrix s(2, 2);
  s(0, 0) = 1.0, s(0, 1) = 2.0, s(1, 0) = 2.0, s(1, 1) = 4.0;
  EXPECT_THROW(dense_solve(s, {1.0, 1.0}), SolverError);
}

}  // namespace
}  // namespace platevi
