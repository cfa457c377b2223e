#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>

#include "platevi/common.hpp"
#include "platevi/sparse.hpp"

namespace platevi {

enum class SolveMethod {
  Auto,               // Direct for explicit matrices, ConjugateGradient otherwise
  ConjugateGradient,  // preconditioned CG
  Direct,             // sparse LDL^T factorization (explicit matrices only)
};

enum class Preconditioner {
  Auto,        // Factorized for implicit operators with an approximation, else Jacobi
  None,
  Jacobi,      // diagonal of the operator's explicit approximation
  Factorized,  // exact solve with the operator's explicit approximation
};

struct SolveOptions {
  double tol = 1e-10;  // relative residual target
  SolveMethod method = SolveMethod::Auto;
  Preconditioner preconditioner = Preconditioner::Auto;
  int max_iterations = 0;  // 0: 10 x (number of free unknowns)
  /// Called with the current iterate after every CG step.
  std::function<void(std::span<const double>)> on_iterate;
};

struct SolveReport {
  int iterations = 0;
  bool factorized = false;
  double relative_residual = 0.0;  // recomputed ||b - Ax|| / ||b|| on the free rows
  double seconds = 0.0;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

/// Prescribed values of selected unknowns, keyed by index.
using FixedValues = std::map<Index, double>;

/// Solve A x = b for symmetric positive definite A.
/// Throws SolverError(NotConverged) past the iteration cap and
/// SolverError(NotSpd) on nonpositive curvature or pivots.
SolveResult solve_spd(const LinearOperator& a, std::span<const double> b, const SolveOptions& options = {});

/// Solve A x = b on the free rows with x fixed to the given values on the
/// constrained indices.
SolveResult solve_constrained(const LinearOperator& a, std::span<const double> b, const FixedValues& fixed,
                              const SolveOptions& options = {});

/// Repeated constrained solves with one operator. For explicit matrices the
/// symbolic factorization is computed once and reused for every fixed set.
class ConstrainedSolver {
 public:
  ConstrainedSolver(const LinearOperator& a, SolveOptions options);
  ~ConstrainedSolver();
  ConstrainedSolver(const ConstrainedSolver&) = delete;
  ConstrainedSolver& operator=(const ConstrainedSolver&) = delete;

  SolveResult solve(std::span<const double> b, const FixedValues& fixed);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Pivots of a sparse LDL^T factorization (fill-reducing ordering), used to
/// certify positive definiteness.
struct LdltPivots {
  bool success = false;
  Vector pivots;
  [[nodiscard]] double min_pivot() const;
};
LdltPivots ldlt_pivots(const SparseSymMatrix& a);

/// Small dense row-major matrix for oracles and Schur complements.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

  [[nodiscard]] Index rows() const noexcept { return rows_; }
  [[nodiscard]] Index cols() const noexcept { return cols_; }
  double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
  double operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
  [[nodiscard]] Vector multiply(std::span<const double> x) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

/// Columns A e_j of an operator.
DenseMatrix densify(const LinearOperator& a);

/// Gaussian elimination with partial pivoting. Throws SolverError(Singular).
Vector dense_solve(DenseMatrix a, Vector b);

}  // namespace platevi
