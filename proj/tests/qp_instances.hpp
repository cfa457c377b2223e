#pragma once

#include <algorithm>
#include <numeric>

#include "platevi/vi_solver.hpp"
#include "test_util.hpp"

namespace platevi::test {

// Dense SPD quadratic program with up to 15 upper bounds, roughly half of
// them binding at the unconstrained minimizer.
inline VIProblem random_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> dim(2, 50);
  const Index n = dim(rng);
  const Index m = std::uniform_int_distribution<Index>(1, std::min<Index>(15, n))(rng);
  const Vector b = random_vector(rng, static_cast<std::size_t>(n * n));
  SparsityPattern pattern(n);
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  pattern.add_clique(all);
  auto a = std::make_shared<SparseSymMatrix>(std::move(pattern));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double s = i == j ? 0.1 * n : 0.0;
      for (Index k = 0; k < n; ++k) s += b[static_cast<std::size_t>(k * n + i)] * b[static_cast<std::size_t>(k * n + j)];
      a->add(i, j, s);
    }
  }
  VIProblem p;
  p.load = random_vector(rng, static_cast<std::size_t>(n), -5.0, 5.0);
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_real_distribution<double> bound(-0.5, 0.5);
  for (Index k = 0; k < m; ++k) p.constraints.push_back({all[static_cast<std::size_t>(k)], bound(rng)});
  std::sort(p.constraints.begin(), p.constraints.end(), [](const Constraint& x, const Constraint& y) { return x.dof < y.dof; });
  p.op = std::move(a);
  return p;
}

}  // namespace platevi::test
