#include "platevi/vi_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

namespace platevi {

void VIProblem::validate() const {
  if (!op) throw InvalidArgument("VI problem has no operator");
  const Index n = op->size();
  if (static_cast<Index>(load.size()) != n) throw InvalidArgument("load vector length differs from operator size");
  if (!(pdas.c > 0.0) || !std::isfinite(pdas.c)) throw InvalidArgument("pdas.c must be positive");
  if (pdas.max_iter < 1) throw InvalidArgument("pdas.max_iter must be at least 1");
  if (!(pdas.kkt_tol > 0.0)) throw InvalidArgument("pdas.tol must be positive");
  std::set<Index> seen;
  for (const auto& c : constraints) {
    if (c.dof < 0 || c.dof >= n) throw InvalidArgument("constraint index " + std::to_string(c.dof) + " out of range");
    if (!std::isfinite(c.bound)) throw InvalidArgument("constraint bound is not finite");
    if (!seen.insert(c.dof).second) throw InvalidArgument("duplicate constraint on index " + std::to_string(c.dof));
  }
}

std::vector<Constraint> vertex_constraints(const FeSpace& space, const Field& psi) {
  std::vector<Constraint> out;
  const Mesh& mesh = space.mesh();
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    const Index dof = space.vertex_dof(v);
    if (dof >= 0) out.push_back({dof, psi.value(mesh.vertex(v))});
  }
  return out;
}

bool KktReport::passes(double stationarity_tol) const {
  return feasibility <= 1e-10 && sign <= 1e-12 && complementarity <= 1e-10 && stationarity <= stationarity_tol &&
         support_violations == 0;
}

KktReport kkt_report(const VIProblem& problem, const Solution& s) {
  const auto& cons = problem.constraints;
  if (s.state.size() != problem.load.size() || s.multiplier.size() != cons.size()) {
    throw InvalidArgument("kkt_report: solution shape does not match the problem");
  }
  KktReport k;
  Vector r = (*problem.op)(s.state);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= problem.load[i];
  std::vector<char> active(cons.size(), 0);
  for (Index a : s.active) active[static_cast<std::size_t>(a)] = 1;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const double lambda = s.multiplier[i];
    const double gap = s.state[static_cast<std::size_t>(cons[i].dof)] - cons[i].bound;
    r[static_cast<std::size_t>(cons[i].dof)] += lambda;
    k.feasibility = std::max(k.feasibility, gap);
    k.sign = std::max(k.sign, -lambda);
    k.complementarity = std::max(k.complementarity, std::abs(lambda * gap));
    if (lambda != 0.0 && !active[i]) ++k.support_violations;
  }
  k.stationarity = norm_inf(r);
  return k;
}

namespace {

std::string describe(const KktReport& k) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "stationarity %.3e, feasibility %.3e, sign %.3e, complementarity %.3e",
                k.stationarity, k.feasibility, k.sign, k.complementarity);
  return buf;
}

}  // namespace

Solution solve_pdas(const VIProblem& problem) {
  problem.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& cons = problem.constraints;
  const std::size_t m = cons.size();
  const double c = problem.pdas.c;

  ConstrainedSolver solver(*problem.op, problem.pdas.solve);
  const Vector y0 = solver.solve(problem.load, {}).x;

  std::vector<char> active(m, 0);
  for (std::size_t i = 0; i < m; ++i) active[i] = y0[static_cast<std::size_t>(cons[i].dof)] > cons[i].bound;

  Solution s;
  s.multiplier.assign(m, 0.0);
  for (int iter = 1; iter <= problem.pdas.max_iter; ++iter) {
    FixedValues fixed;
    for (std::size_t i = 0; i < m; ++i) {
      if (active[i]) fixed[cons[i].dof] = cons[i].bound;
    }
    s.state = fixed.empty() ? y0 : solver.solve(problem.load, fixed).x;
    const Vector ay = (*problem.op)(s.state);

    std::vector<char> next(m, 0);
    s.active.clear();
    for (std::size_t i = 0; i < m; ++i) {
      const auto d = static_cast<std::size_t>(cons[i].dof);
      s.multiplier[i] = active[i] ? problem.load[d] - ay[d] : 0.0;
      if (active[i]) s.active.push_back(static_cast<Index>(i));
      next[i] = s.multiplier[i] + c * (s.state[d] - cons[i].bound) > 0.0;
    }
    s.iterations = iter;
    if (next == active) {
      s.kkt = kkt_report(problem, s);
      s.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (!s.kkt.passes(problem.pdas.kkt_tol)) {
        throw PdasError("PDAS active set settled but KKT check failed: " + describe(s.kkt), s);
      }
      return s;
    }
    active = std::move(next);
  }
  s.kkt = kkt_report(problem, s);
  s.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  throw PdasError("PDAS did not converge in " + std::to_string(problem.pdas.max_iter) + " iterations (" +
                      std::to_string(s.active.size()) + " active constraints; " + describe(s.kkt) + ")",
                  s);
}

namespace {

// y with y[dof] = bound on the chosen constraints, A y = f on the remaining rows.
Vector dense_constrained_solve(const DenseMatrix& a, const Vector& f, const std::vector<Constraint>& cons,
                               const std::vector<char>& active) {
  const Index n = a.rows();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  Vector y(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < cons.size(); ++i) {
    if (!active[i]) continue;
    fixed[static_cast<std::size_t>(cons[i].dof)] = 1;
    y[static_cast<std::size_t>(cons[i].dof)] = cons[i].bound;
  }
  std::vector<Index> free;
  for (Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
  }
  if (free.empty()) return y;
  const auto nf = static_cast<Index>(free.size());
  DenseMatrix aff(nf, nf);
  Vector rhs(free.size());
  for (Index r = 0; r < nf; ++r) {
    const Index i = free[static_cast<std::size_t>(r)];
    double s = f[static_cast<std::size_t>(i)];
    for (Index j = 0; j < n; ++j) {
      if (fixed[static_cast<std::size_t>(j)]) s -= a(i, j) * y[static_cast<std::size_t>(j)];
    }
    rhs[static_cast<std::size_t>(r)] = s;
    for (Index c = 0; c < nf; ++c) aff(r, c) = a(i, free[static_cast<std::size_t>(c)]);
  }
  const Vector yf = dense_solve(std::move(aff), std::move(rhs));
  for (Index r = 0; r < nf; ++r) y[static_cast<std::size_t>(free[static_cast<std::size_t>(r)])] = yf[static_cast<std::size_t>(r)];
  return y;
}

Solution assemble_solution(const DenseMatrix& a, const VIProblem& p, const std::vector<char>& active) {
  Solution s;
  s.state = dense_constrained_solve(a, p.load, p.constraints, active);
  const Vector ay = a.multiply(s.state);
  s.multiplier.assign(p.constraints.size(), 0.0);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    if (!active[i]) continue;
    const auto d = static_cast<std::size_t>(p.constraints[i].dof);
    s.multiplier[i] = p.load[d] - ay[d];
    s.active.push_back(static_cast<Index>(i));
  }
  return s;
}

}  // namespace

Solution qp_oracle(const VIProblem& problem, OracleDiagnostics* diagnostics) {
  problem.validate();
  const Index n = problem.op->size();
  if (n > kOracleMaxSize) {
    throw InvalidArgument("qp_oracle: " + std::to_string(n) + " unknowns exceed the cap of " +
                          std::to_string(kOracleMaxSize));
  }
  const auto start = std::chrono::steady_clock::now();
  OracleDiagnostics diag;
  const auto& cons = problem.constraints;
  const std::size_t m = cons.size();
  const DenseMatrix a = densify(*problem.op);

  // Dual data: W = A^{-1} B^T, G = B W, g = B A^{-1} f - psi.
  const Vector y0 = dense_solve(a, problem.load);
  std::vector<Vector> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    Vector e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(cons[i].dof)] = 1.0;
    w[i] = dense_solve(a, std::move(e));
  }
  DenseMatrix g(static_cast<Index>(m), static_cast<Index>(m));
  Vector gap(m);
  double bound_scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      g(static_cast<Index>(i), static_cast<Index>(j)) = w[j][static_cast<std::size_t>(cons[i].dof)];
    }
    gap[i] = y0[static_cast<std::size_t>(cons[i].dof)] - cons[i].bound;
    bound_scale = std::max(bound_scale, std::abs(cons[i].bound));
  }

  std::vector<char> chosen(m, 0);
  if (m <= static_cast<std::size_t>(kOracleMaxEnumerated)) {
    diag.enumerated = true;
    bool found = false;
    for (unsigned long long mask = 0; mask < (1ULL << m); ++mask) {
      ++diag.candidates_checked;
      std::vector<std::size_t> set;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask & (1ULL << i)) set.push_back(i);
      }
      Vector mu;
      if (!set.empty()) {
        DenseMatrix gs(static_cast<Index>(set.size()), static_cast<Index>(set.size()));
        Vector rhs(set.size());
        for (std::size_t r = 0; r < set.size(); ++r) {
          rhs[r] = gap[set[r]];
          for (std::size_t c = 0; c < set.size(); ++c) {
            gs(static_cast<Index>(r), static_cast<Index>(c)) = g(static_cast<Index>(set[r]), static_cast<Index>(set[c]));
          }
        }
        mu = dense_solve(std::move(gs), std::move(rhs));
      }
      double mu_scale = 1.0;
      for (double v : mu) mu_scale = std::max(mu_scale, std::abs(v));
      bool ok = std::all_of(mu.begin(), mu.end(), [&](double v) { return v >= -1e-10 * mu_scale; });
      for (std::size_t i = 0; ok && i < m; ++i) {
        if (mask & (1ULL << i)) continue;
        double yi = y0[static_cast<std::size_t>(cons[i].dof)];
        for (std::size_t r = 0; r < set.size(); ++r) yi -= w[set[r]][static_cast<std::size_t>(cons[i].dof)] * mu[r];
        ok = yi <= cons[i].bound + 1e-10 * bound_scale;
      }
      if (!ok) continue;
      ++diag.candidates_passing;
      if (!found) {
        found = true;
        for (std::size_t i = 0; i < m; ++i) chosen[i] = (mask >> i) & 1ULL;
      }
    }
    if (!found) throw SolverError(SolverError::Kind::Singular, "qp_oracle: no active set satisfies the KKT conditions");
  } else {
    // projected Gauss-Seidel on min 1/2 mu^T G mu - mu^T gap, mu >= 0
    Vector mu(m, 0.0);
    const long long max_sweeps = 2'000'000;
    for (diag.sweeps = 1; diag.sweeps <= max_sweeps; ++diag.sweeps) {
      double change = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        double r = gap[i];
        for (std::size_t j = 0; j < m; ++j) r -= g(static_cast<Index>(i), static_cast<Index>(j)) * mu[j];
        const double updated = std::max(0.0, mu[i] + r / g(static_cast<Index>(i), static_cast<Index>(i)));
        change = std::max(change, std::abs(updated - mu[i]));
        mu[i] = updated;
        scale = std::max(scale, updated);
      }
      if (change <= 1e-15 * scale) break;
    }
    if (diag.sweeps > max_sweeps) {
      throw SolverError(SolverError::Kind::NotConverged, "qp_oracle: dual Gauss-Seidel did not converge");
    }
    for (std::size_t i = 0; i < m; ++i) chosen[i] = mu[i] > 0.0;
  }

  Solution s = assemble_solution(a, problem, chosen);
  s.iterations = static_cast<int>(diag.enumerated ? diag.candidates_checked : diag.sweeps);
  s.kkt = kkt_report(problem, s);
  s.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (diagnostics) *diagnostics = diag;
  return s;
}

}  // namespace platevi
