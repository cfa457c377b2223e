// plate-vi: solve, study or export meshes for state-constrained optimal
// control problems discretized as fourth-order variational inequalities.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "platevi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for elliptic optimal control with pointwise state constraints"};
  std::string config;
  app.add_option("config", config, "JSON run configuration")->required();
  app.footer("Environment: PLATE_VI_THREADS caps the worker threads of the study command.\n"
             "Exit status: 0 ok, 2 configuration error, 3 solver error, 4 I/O error.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : platevi::kExitConfig;
  }
  return platevi::run(config, std::cout, std::cerr);
}
