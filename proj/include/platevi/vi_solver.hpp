#pragma once

#include <memory>
#include <span>
#include <vector>

#include "platevi/common.hpp"
#include "platevi/fields.hpp"
#include "platevi/linalg.hpp"
#include "platevi/space.hpp"
#include "platevi/sparse.hpp"

namespace platevi {

/// Upper bound y[dof] <= bound.
struct Constraint {
  Index dof = 0;
  double bound = 0.0;
};

struct PdasParams {
  double c = 1.0;          // shift in the active-set update
  int max_iter = 200;
  double kkt_tol = 1e-9;   // stationarity tolerance (max norm)
  SolveOptions solve = subproblem_options();  // equality-constrained solves

  /// Relative tolerance 1e-13: the reduced right-hand side carries A psi from
  /// the active set, so 1e-10 relative can exceed the absolute KKT target.
  static SolveOptions subproblem_options() {
    SolveOptions o;
    o.tol = 1e-13;
    return o;
  }
};

/// min 1/2 y^T A y - f^T y subject to y[dof_i] <= bound_i.
struct VIProblem {
  std::shared_ptr<const LinearOperator> op;
  Vector load;
  std::vector<Constraint> constraints;
  PdasParams pdas;

  /// Shapes, finite bounds, distinct in-range indices, c > 0.
  void validate() const;
};

/// One constraint per interior mesh vertex, in vertex order: y(p) <= psi(p).
std::vector<Constraint> vertex_constraints(const FeSpace& space, const Field& psi);

/// Discrete KKT residuals, each a max norm. B extracts the constrained entries.
struct KktReport {
  double stationarity = 0.0;     // |A y - f + B^T lambda|
  double feasibility = 0.0;      // max(0, y_i - psi_i)
  double sign = 0.0;             // max(0, -lambda_i)
  double complementarity = 0.0;  // |lambda_i (y_i - psi_i)|
  Index support_violations = 0;  // constraints with lambda_i != 0 outside the active set

  /// feasibility <= 1e-10, sign <= 1e-12, complementarity <= 1e-10,
  /// stationarity <= stationarity_tol, no support violations.
  [[nodiscard]] bool passes(double stationarity_tol) const;
};

/// Multipliers follow the nonnegative convention: A y - f + B^T lambda = 0,
/// lambda >= 0. The measure-valued multiplier of the continuous problem is -lambda.
struct Solution {
  Vector state;
  Vector multiplier;           // one entry per constraint
  std::vector<Index> active;   // positions in VIProblem::constraints, ascending
  int iterations = 0;
  KktReport kkt;
  Vector control;              // filled by callers that know the discretization
  double solve_seconds = 0.0;
};

KktReport kkt_report(const VIProblem& problem, const Solution& solution);

/// PDAS ran out of iterations, or reached a fixed active set that fails the
/// KKT test. last() is the final iterate.
class PdasError : public SolverError {
 public:
  PdasError(const std::string& what, Solution last)
      : SolverError(Kind::NotConverged, what), last_(std::make_shared<Solution>(std::move(last))) {}
  [[nodiscard]] const Solution& last() const noexcept { return *last_; }

 private:
  std::shared_ptr<const Solution> last_;
};

/// Primal-dual active set iteration started from the unconstrained minimizer.
Solution solve_pdas(const VIProblem& problem);

struct OracleDiagnostics {
  bool enumerated = false;        // exhaustive path taken
  long long candidates_checked = 0;
  long long candidates_passing = 0;
  long long sweeps = 0;           // dual Gauss-Seidel sweeps otherwise
};

/// Dense reference solver for problems with at most 300 unknowns. Up to 15
/// constraints every active set is tried; beyond that the dual QP is solved by
/// projected Gauss-Seidel.
Solution qp_oracle(const VIProblem& problem, OracleDiagnostics* diagnostics = nullptr);

inline constexpr Index kOracleMaxSize = 300;
inline constexpr Index kOracleMaxEnumerated = 15;

}  // namespace platevi
