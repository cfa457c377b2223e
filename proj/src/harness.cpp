#include "platevi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "platevi/quadrature.hpp"

namespace platevi {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<double, 3> reference_to_barycentric(const std::array<double, 2>& q) {
  return {1.0 - q[0] - q[1], q[0], q[1]};
}

ProblemSpec make_spec(double beta, FieldSpec y_d, FieldSpec psi) {
  ProblemSpec p;
  p.beta = beta;
  p.y_d = std::move(y_d);
  p.psi = std::move(psi);
  return p;
}

}  // namespace

Benchmark manufactured_unconstrained() {
  Benchmark b;
  b.name = "manufactured";
  b.problem = make_spec(1.0, fields::manufactured_rhs(1.0), fields::constant(1e6));
  b.exact_state = fields::sinsin(1.0);
  b.exact_control = fields::sinsin(2.0 * kPi * kPi);
  b.expected = {1.0, 2.0};
  b.n_values = {4, 8, 16, 32};
  return b;
}

std::vector<Benchmark> constrained_benchmarks() {
  Benchmark flat;
  flat.name = "flat-obstacle";
  flat.problem = make_spec(0.1, fields::constant(10.0), fields::constant(0.01));
  flat.n_values = {8, 16, 32};

  Benchmark bowl;
  bowl.name = "paraboloid";
  bowl.problem = make_spec(0.01, fields::constant(1.0), fields::paraboloid(0.05, 0.5));
  bowl.n_values = {8, 16, 32};
  return {flat, bowl};
}

Benchmark find_benchmark(const std::string& name) {
  if (name == "manufactured") return manufactured_unconstrained();
  for (auto& b : constrained_benchmarks()) {
    if (b.name == name) return b;
  }
  throw InvalidArgument("unknown benchmark '" + name + "' (expected manufactured, flat-obstacle or paraboloid)");
}

double strong_residual(const Benchmark& b, Point2 p) {
  if (!b.exact_state) throw InvalidArgument("benchmark '" + b.name + "' has no exact state");
  const Field y = make_field(*b.exact_state);
  const Field y_d = make_field(b.problem.y_d);
  return b.problem.beta * y.bilaplacian(p) + y.value(p) - y_d.value(p);
}

Discretization discretize(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh, const PdasParams& pdas) {
  problem.validate(*mesh);
  Discretization d;
  d.problem = problem;
  d.mesh = mesh;
  d.space = std::make_shared<const FeSpace>(build_space(mesh, state_degree(problem.method)));
  if (problem.method == Method::C0ip) {
    d.op = std::make_shared<const SparseSymMatrix>(assemble_c0ip(*d.space, problem));
  } else {
    d.op = assemble_mixed(*d.space, problem);
  }
  d.vi.op = d.op;
  d.vi.load = assemble_load(*d.space, make_field(problem.y_d));
  d.vi.constraints = vertex_constraints(*d.space, make_field(problem.psi));
  d.vi.pdas = pdas;
  return d;
}

MeshSolution solve_on_mesh(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh, const PdasParams& pdas) {
  MeshSolution out;
  out.disc = discretize(problem, std::move(mesh), pdas);
  out.solution = solve_pdas(out.disc.vi);
  out.solution.control = recover_control(*out.disc.space, out.solution.state);
  return out;
}

MeshSolution solve_on_mesh(const ProblemSpec& problem, int n, const PdasParams& pdas) {
  return solve_on_mesh(problem, std::make_shared<const Mesh>(unit_square_mesh(n)), pdas);
}

ActiveSetGeometry analyze_active_set(const Discretization& disc, const Solution& solution) {
  const Mesh& mesh = *disc.mesh;
  const auto nv = static_cast<std::size_t>(mesh.num_vertices());
  std::vector<char> active(nv, 0);
  ActiveSetGeometry g;
  for (Index a : solution.active) {
    const Index node = disc.space->dof_node(disc.vi.constraints[static_cast<std::size_t>(a)].dof);
    active[static_cast<std::size_t>(node)] = 1;
    ++g.size;
    if (mesh.boundary_vertex(node)) g.interior = false;
  }
  std::vector<Index> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  const auto root = [&parent](Index v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const Edge& e : mesh.edges()) {
    const Index a = e.vertices[0];
    const Index b = e.vertices[1];
    const bool aa = active[static_cast<std::size_t>(a)] != 0;
    const bool ba = active[static_cast<std::size_t>(b)] != 0;
    if ((aa && mesh.boundary_vertex(b)) || (ba && mesh.boundary_vertex(a))) g.interior = false;
    if (aa && ba) parent[static_cast<std::size_t>(root(a))] = root(b);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (active[v] && root(static_cast<Index>(v)) == static_cast<Index>(v)) ++g.components;
  }
  return g;
}

ErrorRow compute_errors(const Benchmark& b, const MeshSolution& coarse) {
  if (!b.exact_state || !b.exact_control) throw InvalidArgument("benchmark '" + b.name + "' has no exact solution");
  const Field y = make_field(*b.exact_state);
  const Field u = make_field(*b.exact_control);
  const FeSpace& space = *coarse.disc.space;
  const Mesh& mesh = space.mesh();
  const ProblemSpec& p = coarse.disc.problem;
  const Vector& yh = coarse.solution.state;
  const Vector& uh = coarse.solution.control;

  double l2 = 0.0, h1 = 0.0, hess = 0.0, control = 0.0;
  const auto rule = triangle_rule(6);
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = TriangleGeometry::of(mesh, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto lambda = reference_to_barycentric(rule.points[q]);
      const Point2 x = geom.map(lambda);
      const double w = rule.weights[q] * 2.0 * geom.area;
      const PointValue v = evaluate_local(space, yh, t, lambda);
      const double e = y.value(x) - v.value;
      const Point2 ge = y.gradient(x) - v.gradient;
      const Hessian2 hy = y.hessian(x);
      const Hessian2 he{hy.xx - v.hessian.xx, hy.xy - v.hessian.xy, hy.yy - v.hessian.yy};
      const double ue = u.value(x) - evaluate_local(space, uh, t, lambda).value;
      l2 += w * e * e;
      h1 += w * dot(ge, ge);
      hess += w * frobenius(he, he);
      control += w * ue * ue;
    }
  }

  double energy2 = 0.0;
  if (p.method == Method::C0ip) {
    double edges = 0.0;
    const auto erule = interval_rule(9);
    for (const Edge& e : mesh.edges()) {
      if (e.boundary()) continue;
      const Point2 a = mesh.vertex(e.vertices[0]);
      const Point2 c = mesh.vertex(e.vertices[1]);
      for (std::size_t q = 0; q < erule.size(); ++q) {
        const Point2 x = a + erule.points[q][0] * (c - a);
        const PointValue v0 = evaluate(space, yh, e.triangles[0], x);
        const PointValue v1 = evaluate(space, yh, e.triangles[1], x);
        // the exact state has no jumps
        const double jump = -dot(v0.gradient - v1.gradient, e.normal);
        const double avg = normal_normal(y.hessian(x), e.normal) -
                           0.5 * (normal_normal(v0.hessian, e.normal) + normal_normal(v1.hessian, e.normal));
        edges += erule.weights[q] * e.length * (-2.0 * avg * jump + p.sigma / e.length * jump * jump);
      }
    }
    energy2 = p.beta * (hess + edges) + l2;
  } else {
    energy2 = p.beta * control + l2;
  }

  double linf = 0.0;
  const Vector vv = vertex_values(space, yh);
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    linf = std::max(linf, std::abs(y.value(mesh.vertex(v)) - vv[static_cast<std::size_t>(v)]));
  }

  ErrorRow row;
  row.h = mesh.h();
  row.ndof = space.size();
  row.err_energy = std::sqrt(std::max(energy2, 0.0));
  row.err_h1 = std::sqrt(h1);
  row.err_linf = linf;
  row.err_l2 = std::sqrt(l2);
  row.err_control = std::sqrt(control);
  row.pdas_iters = coarse.solution.iterations;
  row.solve_seconds = coarse.solution.solve_seconds;
  return row;
}

namespace {

void require_nested(const FeSpace& coarse, const FeSpace& fine) {
  const Mesh& c = coarse.mesh();
  const Mesh& f = fine.mesh();
  const bool same = c.lineage() == f.lineage() && c.level() == f.level() && c.num_triangles() == f.num_triangles();
  if (!same && !f.refines(c)) throw InvalidArgument("reference mesh is not a nested refinement of the coarse mesh");
  if (coarse.degree() != fine.degree()) throw InvalidArgument("coarse and fine spaces have different degrees");
  if (coarse.boundary_treatment() != fine.boundary_treatment()) {
    throw InvalidArgument("coarse and fine spaces treat the boundary differently");
  }
}

}  // namespace

Vector prolongate(const FeSpace& coarse, std::span<const double> coeffs, const FeSpace& fine) {
  require_nested(coarse, fine);
  const int levels = fine.mesh().level() - coarse.mesh().level();
  Vector out(static_cast<std::size_t>(fine.size()), 0.0);
  std::vector<char> done(out.size(), 0);
  for (Index t = 0; t < fine.mesh().num_triangles(); ++t) {
    // vertex barycentrics of t inside its coarse ancestor; all dyadic, so exact
    std::array<std::array<double, 3>, 3> corners{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    for (int l = levels - 1; l >= 0; --l) {
      const auto& child = kChildVertexBarycentric[static_cast<std::size_t>((t >> (2 * l)) & 3)];
      std::array<std::array<double, 3>, 3> next{};
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          for (std::size_t k = 0; k < 3; ++k) next[i][k] += child[i][j] * corners[j][k];
        }
      }
      corners = next;
    }
    const Index ancestor = t >> (2 * levels);
    const auto dofs = fine.local_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const Index d = dofs[i];
      if (d < 0 || done[static_cast<std::size_t>(d)]) continue;
      std::array<double, 3> lambda{};
      if (i < 3) {
        lambda = corners[i];
      } else {
        const std::size_t j = (i - 3 + 1) % 3;
        const std::size_t k = (i - 3 + 2) % 3;
        for (std::size_t c = 0; c < 3; ++c) lambda[c] = 0.5 * (corners[j][c] + corners[k][c]);
      }
      out[static_cast<std::size_t>(d)] = evaluate_local(coarse, coeffs, ancestor, lambda).value;
      done[static_cast<std::size_t>(d)] = 1;
    }
  }
  return out;
}

Vector restrict_to(const FeSpace& fine, std::span<const double> coeffs, const FeSpace& coarse) {
  require_nested(coarse, fine);
  const bool same_mesh = fine.mesh().level() == coarse.mesh().level();
  Vector out(static_cast<std::size_t>(coarse.size()));
  for (Index d = 0; d < coarse.size(); ++d) {
    // coarse vertex v stays vertex v; the midpoint of coarse edge e becomes fine vertex V + e
    const Index node = coarse.dof_node(d);
    const Index fine_dof = same_mesh ? fine.node_dof(node) : fine.vertex_dof(node);
    out[static_cast<std::size_t>(d)] = coeffs[static_cast<std::size_t>(fine_dof)];
  }
  return out;
}

ErrorRow compute_errors(const MeshSolution& coarse, const MeshSolution& reference) {
  const FeSpace& cs = *coarse.disc.space;
  const FeSpace& fs = *reference.disc.space;
  if (coarse.disc.problem.method != reference.disc.problem.method) {
    throw InvalidArgument("coarse and reference solutions use different methods");
  }
  Vector d = prolongate(cs, coarse.solution.state, fs);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = reference.solution.state[i] - d[i];
  Vector du = prolongate(cs, coarse.solution.control, fs);
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = reference.solution.control[i] - du[i];

  const SparseSymMatrix mass = assemble_mass(fs);
  const SparseSymMatrix stiffness = assemble_stiffness(fs);

  const Vector cv = vertex_values(cs, coarse.solution.state);
  const Vector fv = vertex_values(fs, reference.solution.state);
  double linf = 0.0;
  for (std::size_t v = 0; v < cv.size(); ++v) linf = std::max(linf, std::abs(fv[v] - cv[v]));

  ErrorRow row;
  row.h = cs.mesh().h();
  row.ndof = cs.size();
  row.err_energy = energy_norm(*reference.disc.op, d);
  row.err_h1 = std::sqrt(std::max(stiffness.form(d, d), 0.0));
  row.err_linf = linf;
  row.err_l2 = std::sqrt(std::max(mass.form(d, d), 0.0));
  row.err_control = std::sqrt(std::max(mass.form(du, du), 0.0));
  row.pdas_iters = coarse.solution.iterations;
  row.solve_seconds = coarse.solution.solve_seconds;
  return row;
}

double fit_rate(std::span<const double> h, std::span<const double> err) {
  const std::size_t n = std::min(h.size(), err.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(err[i] > 0.0) || !(h[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    sx += std::log(h[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

Rates fit_rates(std::span<const ErrorRow> rows) {
  const auto tail = rows.size() > 3 ? rows.subspan(rows.size() - 3) : rows;
  Vector h, energy, h1, linf, l2, control;
  for (const auto& r : tail) {
    h.push_back(r.h);
    energy.push_back(r.err_energy);
    h1.push_back(r.err_h1);
    linf.push_back(r.err_linf);
    l2.push_back(r.err_l2);
    control.push_back(r.err_control);
  }
  return {fit_rate(h, energy), fit_rate(h, h1), fit_rate(h, linf), fit_rate(h, l2), fit_rate(h, control)};
}

int worker_threads() {
  if (const char* env = std::getenv("PLATE_VI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

StudyResult run_study(const Benchmark& b, Method method, const std::vector<int>& n_values,
                      const StudyOptions& options) {
  if (n_values.empty()) throw InvalidArgument("study needs at least one mesh size");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1) throw InvalidArgument("mesh sizes must be positive");
    if (i > 0 && (n_values[i] <= n_values[i - 1] || n_values[i] % n_values[i - 1] != 0)) {
      throw InvalidArgument("mesh sizes must be strictly increasing, each dividing the next");
    }
  }
  ProblemSpec problem = b.problem;
  problem.method = method;

  StudyResult result;
  result.benchmark = b.name;
  result.method = method;

  const bool exact = b.exact_state.has_value();
  std::vector<std::shared_ptr<const Mesh>> meshes;
  std::optional<MeshSolution> reference;
  if (exact) {
    for (int n : n_values) meshes.push_back(std::make_shared<const Mesh>(unit_square_mesh(n)));
  } else {
    if (!power_of_two(options.reference_factor)) throw InvalidArgument("reference factor must be a power of two");
    meshes.push_back(std::make_shared<const Mesh>(unit_square_mesh(n_values.front())));
    for (std::size_t i = 1; i < n_values.size(); ++i) {
      const int ratio = n_values[i] / n_values[i - 1];
      if (!power_of_two(ratio)) throw InvalidArgument("nested study needs power-of-two ratios between mesh sizes");
      Mesh m = *meshes.back();
      for (int r = ratio; r > 1; r /= 2) m = uniform_refine(m);
      meshes.push_back(std::make_shared<const Mesh>(std::move(m)));
    }
    Mesh fine = *meshes.back();
    for (int r = options.reference_factor; r > 1; r /= 2) fine = uniform_refine(fine);
    result.reference_n = n_values.back() * options.reference_factor;
    try {
      reference = solve_on_mesh(problem, std::make_shared<const Mesh>(std::move(fine)), options.pdas);
    } catch (const SolverError& e) {
      throw StudyAborted(std::string("reference solve failed: ") + e.what(), result);
    }
  }

  const std::size_t cells = meshes.size();
  std::vector<std::optional<ErrorRow>> rows(cells);
  std::vector<std::string> failures(cells);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < cells; i = next++) {
      try {
        const MeshSolution s = solve_on_mesh(problem, meshes[i], options.pdas);
        rows[i] = exact ? compute_errors(b, s) : compute_errors(s, *reference);
        if (!options.record_timing) rows[i]->solve_seconds = 0.0;
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  const int threads = std::clamp(options.threads > 0 ? options.threads : worker_threads(), 1, static_cast<int>(cells));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::string failure;
  for (std::size_t i = 0; i < cells; ++i) {
    if (rows[i]) {
      result.rows.push_back(*rows[i]);
    } else if (failure.empty()) {
      failure = "n=" + std::to_string(n_values[i]) + ": " + failures[i];
    }
  }
  result.rates = fit_rates(result.rows);
  if (!failure.empty()) throw StudyAborted("study aborted at " + failure, result);
  return result;
}

}  // namespace platevi
