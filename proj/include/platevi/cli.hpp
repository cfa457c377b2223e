#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "platevi/assembly.hpp"
#include "platevi/vi_solver.hpp"

namespace platevi {

/// The configuration document is invalid.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Command { Solve, Study, ExportMesh };

/// Parsed run configuration.
///
///   {
///     "command": "solve" | "study" | "export-mesh",
///     "domain": "unit_square",
///     "n": 16 | [8, 16, 32],
///     "method": "c0ip" | "mixed",
///     "benchmark": "manufactured" | "flat-obstacle" | "paraboloid",
///     "beta": 0.1, "sigma": 10,
///     "y_d": {"name": "constant", "value": 10},
///     "psi": {"name": "paraboloid", "base": 0.05, "curvature": 0.5},
///     "pdas": {"c": 1, "max_iter": 200, "tol": 1e-9},
///     "output": {"vtk": "out.vtk", "csv": "study.csv", "summary": "summary.json"},
///     "record_timing": false
///   }
///
/// "benchmark" supplies beta, y_d and psi and excludes them; otherwise solve
/// and study need all three. Unknown keys are rejected.
struct RunConfig {
  Command command = Command::Solve;
  std::string domain = "unit_square";
  std::vector<int> n;
  std::optional<std::string> benchmark;
  ProblemSpec problem;
  PdasParams pdas;
  std::string vtk_path;
  std::string csv_path;
  std::string summary_path;
  bool record_timing = false;
};

RunConfig parse_config(std::string_view json_text);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

/// Execute the configuration at `config_path`. A one-line JSON summary goes
/// to `out`; failures print a one-line JSON error to `err`.
int run(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace platevi
