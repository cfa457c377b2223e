#include "platevi/linalg.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

namespace platevi {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
using EigenLdlt = Eigen::SimplicialLDLT<EigenSparse, Eigen::Lower>;

// CSR of a symmetric matrix is its own CSC, so the arrays map directly.
Eigen::Map<const EigenSparse> as_eigen(const SparseSymMatrix& a, std::span<const double> values) {
  return {a.size(), a.size(), static_cast<Index>(a.nonzeros()), a.row_ptr().data(), a.cols().data(), values.data()};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<char> fixed_mask(Index n, const FixedValues& fixed) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (const auto& [i, v] : fixed) {
    if (i < 0 || i >= n) throw InvalidArgument("fixed index " + std::to_string(i) + " out of range");
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

/// LDL^T of an explicit matrix with fixed rows/columns replaced by identity.
/// The sparsity pattern never changes, so the symbolic analysis runs once.
class ReducedFactorization {
 public:
  explicit ReducedFactorization(const SparseSymMatrix& a) : a_(a), values_(a.values().begin(), a.values().end()) {
    ldlt_.analyzePattern(as_eigen(a_, values_));
  }

  void factorize(const std::vector<char>& mask) {
    if (factored_ && mask == mask_) return;
    const auto rp = a_.row_ptr();
    const auto cols = a_.cols();
    const auto vals = a_.values();
    for (Index i = 0; i < a_.size(); ++i) {
      for (Index k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
        const Index j = cols[static_cast<std::size_t>(k)];
        const auto kk = static_cast<std::size_t>(k);
        if (mask[static_cast<std::size_t>(i)] || mask[static_cast<std::size_t>(j)]) {
          values_[kk] = (i == j) ? 1.0 : 0.0;
        } else {
          values_[kk] = vals[kk];
        }
      }
    }
    ldlt_.factorize(as_eigen(a_, values_));
    if (ldlt_.info() != Eigen::Success) throw SolverError(SolverError::Kind::NotSpd, "LDL^T factorization failed");
    if (ldlt_.vectorD().minCoeff() <= 0.0) {
      throw SolverError(SolverError::Kind::NotSpd, "operator not SPD: nonpositive pivot in LDL^T factorization");
    }
    mask_ = mask;
    factored_ = true;
  }

  void solve(std::span<const double> rhs, std::span<double> x) const {
    Eigen::Map<const Eigen::VectorXd> r(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::Map<Eigen::VectorXd> out(x.data(), static_cast<Eigen::Index>(x.size()));
    out = ldlt_.solve(r);
  }

 private:
  const SparseSymMatrix& a_;
  Vector values_;
  EigenLdlt ldlt_;
  std::vector<char> mask_;
  bool factored_ = false;
};

// Residual a backward-stable solve can be expected to reach in double
// precision: 16 u || |b| + |A||x| || over the free rows (0 if unknown).
double rounding_floor(const LinearOperator& a, std::span<const double> b, std::span<const double> x,
                      const std::vector<char>& mask) {
  Vector ax(x.size());
  if (!a.abs_apply(x, ax)) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (mask[i]) continue;
    const double s = std::abs(b[i]) + ax[i];
    sum += s * s;
  }
  return 16.0 * std::numeric_limits<double>::epsilon() * std::sqrt(sum);
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

double LdltPivots::min_pivot() const {
  return pivots.empty() ? 0.0 : *std::min_element(pivots.begin(), pivots.end());
}

LdltPivots ldlt_pivots(const SparseSymMatrix& a) {
  EigenLdlt ldlt;
  ldlt.compute(as_eigen(a, a.values()));
  LdltPivots out;
  out.success = ldlt.info() == Eigen::Success;
  if (out.success) {
    const auto& d = ldlt.vectorD();
    out.pivots.assign(d.data(), d.data() + d.size());
  }
  return out;
}

struct ConstrainedSolver::Impl {
  const LinearOperator& a;
  SolveOptions options;
  const SparseSymMatrix* explicit_matrix = nullptr;
  std::optional<ReducedFactorization> direct;
  std::optional<ReducedFactorization> preconditioner;
  Vector jacobi;
  Preconditioner kind = Preconditioner::None;

  Impl(const LinearOperator& op, SolveOptions opts) : a(op), options(std::move(opts)) {
    explicit_matrix = dynamic_cast<const SparseSymMatrix*>(&a);
    SolveMethod method = options.method;
    if (method == SolveMethod::Auto) {
      method = explicit_matrix ? SolveMethod::Direct : SolveMethod::ConjugateGradient;
    }
    if (method == SolveMethod::Direct) {
      if (!explicit_matrix) throw InvalidArgument("direct solve requires an explicit matrix");
      direct.emplace(*explicit_matrix);
      return;
    }
    kind = options.preconditioner;
    const SparseSymMatrix* approx = a.approximation();
    if (kind == Preconditioner::Auto) {
      kind = (approx && !explicit_matrix) ? Preconditioner::Factorized : Preconditioner::Jacobi;
    }
    if ((kind == Preconditioner::Factorized || kind == Preconditioner::Jacobi) && !approx) kind = Preconditioner::None;
    if (kind == Preconditioner::Factorized) preconditioner.emplace(*approx);
    if (kind == Preconditioner::Jacobi) {
      jacobi = approx->diagonal_values();
      for (double& d : jacobi) {
        if (!(d > 0.0)) throw SolverError(SolverError::Kind::NotSpd, "operator not SPD: nonpositive diagonal");
        d = 1.0 / d;
      }
    }
  }

  // residual of the free rows, with fixed rows zeroed
  void free_residual(std::span<const double> b, std::span<const double> x, const std::vector<char>& mask,
                     std::span<double> r) const {
    a.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = mask[i] ? 0.0 : b[i] - r[i];
  }

  SolveResult solve(std::span<const double> b, const FixedValues& fixed) {
    const auto start = std::chrono::steady_clock::now();
    const Index n = a.size();
    if (static_cast<Index>(b.size()) != n) throw InvalidArgument("right-hand side has wrong length");
    const auto mask = fixed_mask(n, fixed);
    const auto un = static_cast<std::size_t>(n);

    SolveResult result;
    result.x.assign(un, 0.0);
    for (const auto& [i, v] : fixed) result.x[static_cast<std::size_t>(i)] = v;

    Vector r(un);
    free_residual(b, result.x, mask, r);
    const double bnorm = norm2(r);
    const auto free_count = static_cast<Index>(std::count(mask.begin(), mask.end(), 0));
    if (bnorm == 0.0 || free_count == 0) {
      result.report.seconds = seconds_since(start);
      return result;
    }

    if (direct) {
      direct->factorize(mask);
      result.report.factorized = true;
      Vector dx(un);
      // a couple of refinement sweeps absorb roundoff in badly scaled systems
      for (int sweep = 0; sweep < 3; ++sweep) {
        direct->solve(r, dx);
        for (std::size_t i = 0; i < un; ++i) {
          if (!mask[i]) result.x[i] += dx[i];
        }
        free_residual(b, result.x, mask, r);
        result.report.relative_residual = norm2(r) / bnorm;
        if (result.report.relative_residual <= options.tol * 1e-2) break;
      }
      const double floor = rounding_floor(a, b, result.x, mask) / bnorm;
      if (!(result.report.relative_residual <= std::max(options.tol, floor))) {
        throw SolverError(SolverError::Kind::NotConverged, "direct solve residual " +
                                                               format_sci(result.report.relative_residual) +
                                                               " above tolerance " + format_sci(options.tol));
      }
      result.report.seconds = seconds_since(start);
      return result;
    }

    if (kind == Preconditioner::Factorized) preconditioner->factorize(mask);
    const int cap = options.max_iterations > 0 ? options.max_iterations : 10 * free_count;
    Vector z(un), p(un), q(un);
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
      switch (kind) {
        case Preconditioner::Factorized:
          preconditioner->solve(in, out);
          break;
        case Preconditioner::Jacobi:
          for (std::size_t i = 0; i < un; ++i) out[i] = jacobi[i] * in[i];
          break;
        default:
          std::copy(in.begin(), in.end(), out.begin());
      }
      for (std::size_t i = 0; i < un; ++i) {
        if (mask[i]) out[i] = 0.0;
      }
    };

    int iterations = 0;
    double floor = 0.0;
    // restarts guard against drift between recursive and true residual
    for (int restart = 0; restart < 5; ++restart) {
      precondition(r, z);
      p = z;
      double rz = dot(r, z);
      bool converged = false;
      while (iterations < cap) {
        a.apply(p, q);
        for (std::size_t i = 0; i < un; ++i) {
          if (mask[i]) q[i] = 0.0;
        }
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
          throw SolverError(SolverError::Kind::NotSpd, "operator not SPD: nonpositive curvature in CG");
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < un; ++i) {
          result.x[i] += alpha * p[i];
          r[i] -= alpha * q[i];
        }
        ++iterations;
        if (options.on_iterate) options.on_iterate(result.x);
        if (norm2(r) <= options.tol * bnorm) {
          converged = true;
          break;
        }
        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < un; ++i) p[i] = z[i] + beta * p[i];
      }
      free_residual(b, result.x, mask, r);
      result.report.relative_residual = norm2(r) / bnorm;
      floor = rounding_floor(a, b, result.x, mask) / bnorm;
      if (converged && result.report.relative_residual <= std::max(options.tol, floor)) break;
      if (iterations >= cap) break;
    }
    result.report.iterations = iterations;
    result.report.seconds = seconds_since(start);
    if (!(result.report.relative_residual <= std::max(options.tol, floor))) {
      throw SolverError(SolverError::Kind::NotConverged,
                        "CG did not converge in " + std::to_string(iterations) + " iterations (relative residual " +
                            format_sci(result.report.relative_residual) + ")");
    }
    return result;
  }
};

ConstrainedSolver::ConstrainedSolver(const LinearOperator& a, SolveOptions options)
    : impl_(std::make_unique<Impl>(a, std::move(options))) {}

ConstrainedSolver::~ConstrainedSolver() = default;

SolveResult ConstrainedSolver::solve(std::span<const double> b, const FixedValues& fixed) {
  return impl_->solve(b, fixed);
}

SolveResult solve_spd(const LinearOperator& a, std::span<const double> b, const SolveOptions& options) {
  return ConstrainedSolver(a, options).solve(b, {});
}

SolveResult solve_constrained(const LinearOperator& a, std::span<const double> b, const FixedValues& fixed,
                              const SolveOptions& options) {
  return ConstrainedSolver(a, options).solve(b, fixed);
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
  Vector y(static_cast<std::size_t>(rows_), 0.0);
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index j = 0; j < cols_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

DenseMatrix densify(const LinearOperator& a) {
  const Index n = a.size();
  DenseMatrix d(n, n);
  Vector e(static_cast<std::size_t>(n), 0.0), col(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    a.apply(e, col);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Index i = 0; i < n; ++i) d(i, j) = col[static_cast<std::size_t>(i)];
  }
  return d;
}

Vector dense_solve(DenseMatrix a, Vector b) {
  const Index n = a.rows();
  if (a.cols() != n || static_cast<Index>(b.size()) != n) throw InvalidArgument("dense_solve: shape mismatch");
  double scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  }
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (!(std::abs(a(piv, k)) > 1e-18 * scale)) {
      throw SolverError(SolverError::Kind::Singular, "dense_solve: matrix is singular");
    }
    if (piv != k) {
      for (Index j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv)]);
    }
    for (Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(k)];
    }
  }
  Vector x(static_cast<std::size_t>(n));
  for (Index i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / a(i, i);
  }
  return x;
}

}  // namespace platevi
