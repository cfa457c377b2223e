#include "platevi/cli.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "platevi/harness.hpp"
#include "platevi/io.hpp"

namespace platevi {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  const auto i = v.get<long long>();
  if (i < 1 || i > 1 << 20) throw ConfigError("'" + key + "' must be a positive integer");
  return static_cast<int>(i);
}

std::string string(const Json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

FieldSpec field(const Json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError("'" + key + "' must be an object with a \"name\" entry");
  if (!v.contains("name")) throw ConfigError("'" + key + "' lacks \"name\"");
  FieldSpec spec;
  spec.name = string(v.at("name"), key + ".name");
  for (const auto& [param, value] : v.items()) {
    if (param == "name") continue;
    spec.params[param] = number(value, key + "." + param);
  }
  try {
    (void)make_field(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("'") + key + "': " + e.what());
  }
  return spec;
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc,
                 {"command", "domain", "n", "method", "benchmark", "beta", "sigma", "y_d", "psi", "pdas", "output",
                  "record_timing"},
                 "configuration");

  RunConfig cfg;
  if (!doc.contains("command")) throw ConfigError("missing 'command'");
  const std::string command = string(doc.at("command"), "command");
  if (command == "solve") {
    cfg.command = Command::Solve;
  } else if (command == "study") {
    cfg.command = Command::Study;
  } else if (command == "export-mesh") {
    cfg.command = Command::ExportMesh;
  } else {
    throw ConfigError("unknown command '" + command + "' (expected solve, study or export-mesh)");
  }

  if (doc.contains("domain")) {
    cfg.domain = string(doc.at("domain"), "domain");
    if (cfg.domain != "unit_square") throw ConfigError("unsupported domain '" + cfg.domain + "'");
  }

  if (!doc.contains("n")) throw ConfigError("missing 'n'");
  const Json& n = doc.at("n");
  if (n.is_array()) {
    if (cfg.command != Command::Study) throw ConfigError("'n' must be a single integer for " + command);
    if (n.empty()) throw ConfigError("'n' must not be empty");
    for (const auto& v : n) cfg.n.push_back(integer(v, "n"));
  } else {
    cfg.n.push_back(integer(n, "n"));
  }

  if (doc.contains("method")) {
    try {
      cfg.problem.method = parse_method(string(doc.at("method"), "method"));
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("sigma")) cfg.problem.sigma = number(doc.at("sigma"), "sigma");

  const bool needs_problem = cfg.command != Command::ExportMesh;
  if (doc.contains("benchmark")) {
    for (const char* key : {"beta", "y_d", "psi"}) {
      if (doc.contains(key)) throw ConfigError(std::string("'") + key + "' conflicts with 'benchmark'");
    }
    cfg.benchmark = string(doc.at("benchmark"), "benchmark");
    Benchmark b;
    try {
      b = find_benchmark(*cfg.benchmark);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    cfg.problem.beta = b.problem.beta;
    cfg.problem.y_d = b.problem.y_d;
    cfg.problem.psi = b.problem.psi;
  } else {
    for (const char* key : {"beta", "y_d", "psi"}) {
      if (needs_problem && !doc.contains(key)) throw ConfigError(std::string("missing '") + key + "'");
    }
    if (doc.contains("beta")) cfg.problem.beta = number(doc.at("beta"), "beta");
    if (doc.contains("y_d")) cfg.problem.y_d = field(doc.at("y_d"), "y_d");
    if (doc.contains("psi")) cfg.problem.psi = field(doc.at("psi"), "psi");
  }

  if (doc.contains("pdas")) {
    const Json& p = doc.at("pdas");
    if (!p.is_object()) throw ConfigError("'pdas' must be an object");
    reject_unknown(p, {"c", "max_iter", "tol"}, "pdas");
    if (p.contains("c")) cfg.pdas.c = number(p.at("c"), "pdas.c");
    if (p.contains("max_iter")) cfg.pdas.max_iter = integer(p.at("max_iter"), "pdas.max_iter");
    if (p.contains("tol")) cfg.pdas.kkt_tol = number(p.at("tol"), "pdas.tol");
    if (!(cfg.pdas.c > 0.0)) throw ConfigError("'pdas.c' must be positive");
    if (!(cfg.pdas.kkt_tol > 0.0)) throw ConfigError("'pdas.tol' must be positive");
  }

  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    if (!o.is_object()) throw ConfigError("'output' must be an object");
    reject_unknown(o, {"vtk", "csv", "summary"}, "output");
    if (o.contains("vtk")) cfg.vtk_path = string(o.at("vtk"), "output.vtk");
    if (o.contains("csv")) cfg.csv_path = string(o.at("csv"), "output.csv");
    if (o.contains("summary")) cfg.summary_path = string(o.at("summary"), "output.summary");
  }
  if ((cfg.command == Command::Solve || cfg.command == Command::ExportMesh) && cfg.vtk_path.empty()) {
    throw ConfigError("'" + command + "' needs 'output.vtk'");
  }
  if (cfg.command == Command::Study && cfg.csv_path.empty()) throw ConfigError("'study' needs 'output.csv'");

  if (doc.contains("record_timing")) {
    if (!doc.at("record_timing").is_boolean()) throw ConfigError("'record_timing' must be true or false");
    cfg.record_timing = doc.at("record_timing").get<bool>();
  }

  if (needs_problem) {
    for (std::size_t i = 1; i < cfg.n.size(); ++i) {
      if (cfg.n[i] <= cfg.n[i - 1] || cfg.n[i] % cfg.n[i - 1] != 0) {
        throw ConfigError("'n' must be strictly increasing with each entry dividing the next");
      }
    }
    try {
      cfg.problem.validate(unit_square_mesh(cfg.n.front()));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  return cfg;
}

namespace {

OrderedJson kkt_json(const KktReport& k) {
  OrderedJson j;
  j["stationarity"] = k.stationarity;
  j["feasibility"] = k.feasibility;
  j["sign"] = k.sign;
  j["complementarity"] = k.complementarity;
  return j;
}

OrderedJson rates_json(const Rates& r) {
  OrderedJson j;
  j["energy"] = r.energy;
  j["h1"] = r.h1;
  j["linf"] = r.linf;
  return j;
}

std::string study_csv(const StudyResult& r) {
  std::ostringstream os;
  write_study_csv(os, r);
  return os.str();
}

OrderedJson execute(const RunConfig& cfg) {
  OrderedJson summary;
  summary["status"] = "ok";
  if (cfg.command == Command::ExportMesh) {
    const Mesh mesh = unit_square_mesh(cfg.n.front());
    std::ostringstream os;
    write_vtk_mesh(os, mesh);
    write_text_file(cfg.vtk_path, os.str());
    summary["command"] = "export-mesh";
    summary["n"] = cfg.n.front();
    summary["vertices"] = mesh.num_vertices();
    summary["triangles"] = mesh.num_triangles();
    summary["vtk"] = cfg.vtk_path;
    return summary;
  }

  if (cfg.command == Command::Solve) {
    const MeshSolution s = solve_on_mesh(cfg.problem, cfg.n.front(), cfg.pdas);
    std::ostringstream os;
    write_vtk_fields(os, *s.disc.mesh, solution_vertex_fields(s));
    write_text_file(cfg.vtk_path, os.str());
    summary["command"] = "solve";
    summary["method"] = std::string(to_string(cfg.problem.method));
    summary["n"] = cfg.n.front();
    summary["ndof"] = s.disc.space->size();
    summary["constraints"] = s.disc.vi.constraints.size();
    summary["active"] = s.solution.active.size();
    summary["pdas_iterations"] = s.solution.iterations;
    summary["kkt"] = kkt_json(s.solution.kkt);
    if (cfg.record_timing) summary["solve_seconds"] = s.solution.solve_seconds;
    summary["vtk"] = cfg.vtk_path;
    return summary;
  }

  Benchmark b;
  if (cfg.benchmark) {
    b = find_benchmark(*cfg.benchmark);
  } else {
    b.name = "custom";
  }
  b.problem = cfg.problem;
  StudyOptions options;
  options.pdas = cfg.pdas;
  options.record_timing = cfg.record_timing;
  StudyResult result;
  try {
    result = run_study(b, cfg.problem.method, cfg.n, options);
  } catch (const StudyAborted& e) {
    if (!e.partial().rows.empty()) write_text_file(cfg.csv_path, study_csv(e.partial()));
    throw;
  }
  write_text_file(cfg.csv_path, study_csv(result));
  summary["command"] = "study";
  summary["benchmark"] = b.name;
  summary["method"] = std::string(to_string(cfg.problem.method));
  summary["rows"] = result.rows.size();
  if (result.reference_n > 0) summary["reference_n"] = result.reference_n;
  summary["rates"] = rates_json(result.rates);
  summary["csv"] = cfg.csv_path;
  return summary;
}

int fail(std::ostream& err, int code, const char* kind, const std::string& message) {
  OrderedJson j;
  j["status"] = "error";
  j["kind"] = kind;
  j["exit_code"] = code;
  j["message"] = message;
  err << j.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
  return code;
}

}  // namespace

int run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  std::string text;
  {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) return fail(err, kExitIo, "io", "cannot read configuration '" + config_path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  RunConfig cfg;
  try {
    cfg = parse_config(text);
  } catch (const InvalidArgument& e) {
    return fail(err, kExitConfig, "config", e.what());
  } catch (const Json::exception& e) {
    return fail(err, kExitConfig, "config", e.what());
  }
  try {
    const OrderedJson summary = execute(cfg);
    const std::string line = summary.dump(-1, ' ', false, Json::error_handler_t::replace);
    if (!cfg.summary_path.empty()) write_text_file(cfg.summary_path, line + "\n");
    out << line << '\n';
    return kExitOk;
  } catch (const IoError& e) {
    return fail(err, kExitIo, "io", e.what());
  } catch (const InvalidArgument& e) {
    return fail(err, kExitConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitSolver, "solver", e.what());
  }
}

}  // namespace platevi
