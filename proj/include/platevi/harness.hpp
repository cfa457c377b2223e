#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "platevi/assembly.hpp"
#include "platevi/fields.hpp"
#include "platevi/mesh.hpp"
#include "platevi/space.hpp"
#include "platevi/vi_solver.hpp"

namespace platevi {

struct ExpectedRates {
  double energy = 1.0;  // alpha on the convex square
  double lower = 2.0;   // observed H^1 / vertex max-norm order, not a theorem
};

/// A named problem instance with optional closed-form solution.
struct Benchmark {
  std::string name;
  ProblemSpec problem;
  std::optional<FieldSpec> exact_state;
  std::optional<FieldSpec> exact_control;
  ExpectedRates expected;
  std::vector<int> n_values;
};

/// beta = 1, y = sin(pi x) sin(pi y), y_d = (4 pi^4 + 1) y, psi = 1e6, u = 2 pi^2 y.
Benchmark manufactured_unconstrained();
/// "flat-obstacle" and "paraboloid".
std::vector<Benchmark> constrained_benchmarks();
/// Lookup by name among all shipped benchmarks ("manufactured" included).
Benchmark find_benchmark(const std::string& name);

/// beta Delta^2 y + y - y_d at p for a benchmark with an exact state.
double strong_residual(const Benchmark& b, Point2 p);

/// Everything needed to solve one problem on one mesh.
struct Discretization {
  ProblemSpec problem;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FeSpace> space;
  std::shared_ptr<const LinearOperator> op;
  VIProblem vi;
};

Discretization discretize(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh, const PdasParams& pdas = {});

struct MeshSolution {
  Discretization disc;
  Solution solution;  // control filled in
};

MeshSolution solve_on_mesh(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh, const PdasParams& pdas = {});
MeshSolution solve_on_mesh(const ProblemSpec& problem, int n, const PdasParams& pdas = {});

/// Shape of the computed contact region.
struct ActiveSetGeometry {
  Index size = 0;
  Index components = 0;  // connected through mesh edges
  bool interior = true;  // no active vertex on, or sharing an edge with, the boundary
};
ActiveSetGeometry analyze_active_set(const Discretization& disc, const Solution& solution);

struct ErrorRow {
  double h = 0.0;
  Index ndof = 0;
  double err_energy = 0.0;
  double err_h1 = 0.0;
  double err_linf = 0.0;     // over mesh vertices
  double err_l2 = 0.0;
  double err_control = 0.0;  // L2
  int pdas_iters = 0;
  double solve_seconds = 0.0;
};

/// Errors against the benchmark's closed-form state and control. The energy
/// error is a_h(e, e)^(1/2) with a_h extended to smooth-plus-discrete functions.
ErrorRow compute_errors(const Benchmark& b, const MeshSolution& coarse);
/// Errors against a solution on a nested uniform refinement: the coarse
/// solution is prolonged exactly and the difference measured with the fine
/// operator, stiffness and mass; the max norm runs over coarse vertices.
ErrorRow compute_errors(const MeshSolution& coarse, const MeshSolution& reference);

/// Coefficients on `fine` of the coarse function. Throws unless fine.mesh() refines coarse.mesh().
Vector prolongate(const FeSpace& coarse, std::span<const double> coeffs, const FeSpace& fine);
/// Coefficients of a fine function sampled at the coarse nodes.
Vector restrict_to(const FeSpace& fine, std::span<const double> coeffs, const FeSpace& coarse);

/// Least-squares slope of log(err) against log(h). NaN for fewer than two
/// points or a nonpositive error.
double fit_rate(std::span<const double> h, std::span<const double> err);

struct Rates {
  double energy = 0.0;
  double h1 = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double control = 0.0;
};
/// Slopes over the last three rows.
Rates fit_rates(std::span<const ErrorRow> rows);

struct StudyResult {
  std::string benchmark;
  Method method = Method::C0ip;
  std::vector<ErrorRow> rows;  // decreasing h
  Rates rates;
  int reference_n = 0;  // 0 when errors are against the exact solution
};

struct StudyOptions {
  int threads = 0;  // 0: worker_threads()
  PdasParams pdas;
  int reference_factor = 4;
  bool record_timing = true;  // false writes zero solve times
};

/// PLATE_VI_THREADS if set to a positive integer, else hardware concurrency.
int worker_threads();

/// A study stopped on a solver error. partial() holds the rows that finished.
class StudyAborted : public Error {
 public:
  StudyAborted(const std::string& what, StudyResult partial)
      : Error(what), partial_(std::make_shared<StudyResult>(std::move(partial))) {}
  [[nodiscard]] const StudyResult& partial() const noexcept { return *partial_; }

 private:
  std::shared_ptr<const StudyResult> partial_;
};

/// One row per n. Benchmarks without an exact state are compared with a
/// solution on a mesh reference_factor times finer than the largest n, which
/// requires every ratio between consecutive n to be a power of two.
StudyResult run_study(const Benchmark& b, Method method, const std::vector<int>& n_values,
                      const StudyOptions& options = {});

}  // namespace platevi
