#include "platevi/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace platevi {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_grid(std::ostream& os, const Mesh& mesh, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point2& p : mesh.vertices()) os << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  const Index nt = mesh.num_triangles();
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const Triangle& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (Index t = 0; t < nt; ++t) os << "5\n";
}

}  // namespace

void write_vtk_mesh(std::ostream& os, const Mesh& mesh, const std::string& title) { write_grid(os, mesh, title); }

void write_vtk_fields(std::ostream& os, const Mesh& mesh, const std::vector<std::pair<std::string, Vector>>& fields,
                      const std::string& title) {
  write_grid(os, mesh, title);
  if (fields.empty()) return;
  os << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (const auto& [name, values] : fields) {
    if (static_cast<Index>(values.size()) != mesh.num_vertices()) {
      throw InvalidArgument("VTK field '" + name + "' has " + std::to_string(values.size()) + " values for " +
                            std::to_string(mesh.num_vertices()) + " vertices");
    }
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) os << format_double(v) << '\n';
  }
}

std::vector<std::pair<std::string, Vector>> solution_vertex_fields(const MeshSolution& s) {
  const FeSpace& space = *s.disc.space;
  const auto nv = static_cast<std::size_t>(space.mesh().num_vertices());
  Vector multiplier(nv, 0.0);
  Vector active(nv, 0.0);
  const auto& cons = s.disc.vi.constraints;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    multiplier[static_cast<std::size_t>(space.dof_node(cons[i].dof))] = s.solution.multiplier[i];
  }
  for (Index a : s.solution.active) {
    active[static_cast<std::size_t>(space.dof_node(cons[static_cast<std::size_t>(a)].dof))] = 1.0;
  }
  return {{"state", vertex_values(space, s.solution.state)},
          {"multiplier", std::move(multiplier)},
          {"active", std::move(active)},
          {"control", vertex_values(space, s.solution.control)}};
}

void write_study_csv(std::ostream& os, const StudyResult& result) {
  os << kStudyCsvHeader << '\n';
  for (const auto& r : result.rows) {
    os << format_double(r.h) << ',' << r.ndof << ',' << format_double(r.err_energy) << ',' << format_double(r.err_h1)
       << ',' << format_double(r.err_linf) << ',' << r.pdas_iters << ',' << format_double(r.solve_seconds) << '\n';
  }
  os << "# rate_energy=" << format_double(result.rates.energy) << ",rate_h1=" << format_double(result.rates.h1)
     << ",rate_linf=" << format_double(result.rates.linf) << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace platevi
