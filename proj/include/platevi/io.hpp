#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "platevi/harness.hpp"
#include "platevi/mesh.hpp"

namespace platevi {

/// Failure to read or write a file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// printf("%.17g"): round-trips every double.
std::string format_double(double v);

/// Legacy VTK (ASCII, version 3.0) unstructured grid of triangles.
void write_vtk_mesh(std::ostream& os, const Mesh& mesh, const std::string& title = "plate-vi mesh");

/// Mesh plus one SCALARS array per field under a single POINT_DATA header.
/// Every field holds one value per mesh vertex.
void write_vtk_fields(std::ostream& os, const Mesh& mesh, const std::vector<std::pair<std::string, Vector>>& fields,
                      const std::string& title = "plate-vi solution");

/// Vertex fields of a solution: state, multiplier, active (0/1), control.
std::vector<std::pair<std::string, Vector>> solution_vertex_fields(const MeshSolution& s);

inline constexpr const char* kStudyCsvHeader = "h,ndof,err_energy,err_h1,err_linf,pdas_iters,solve_seconds";

/// Header, one row per mesh, then "# rate_energy=...,rate_h1=...,rate_linf=...".
void write_study_csv(std::ostream& os, const StudyResult& result);

/// Replace the file at `path` with `text`. Throws IoError.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace platevi
