// Command-line front end: certify, simulate, track, optimize, project.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swimlab/errors.hpp"
#include "swimlab/workflows.hpp"

int main(int argc, char** argv) {
  using namespace swimlab;

  CLI::App app{"Stokes-flow microswimmer laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int quadrature_degree = 0;
  double step = 0.0;
  std::string control_file;
  std::string path_file;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--quadrature-degree", quadrature_degree, "sphere quadrature degree L");
    sub->add_option("--step", step, "integrator step");
  };
  CLI::App* certify = app.add_subcommand("certify", "resistance operators and controllability certificate");
  CLI::App* simulate = app.add_subcommand("simulate", "integrate a control file");
  CLI::App* track = app.add_subcommand("track", "track a rigid reference path with strokes");
  CLI::App* optimize = app.add_subcommand("optimize", "optimize a stroke for a required displacement");
  CLI::App* project = app.add_subcommand("project", "project a boundary path onto the allowable set");
  for (CLI::App* sub : {certify, simulate, track, optimize, project}) common(sub);
  simulate->add_option("--control", control_file, "control file (overrides simulate.control_file)");
  project->add_option("--path", path_file, "boundary path file (overrides project.path_file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitConfig;
  }

  return run_guarded(
      [&]() {
        RunConfig config = load_config(config_path);
        Overrides o;
        for (CLI::App* sub : app.get_subcommands()) {
          if (sub->count("--seed")) o.seed = seed;
          if (sub->count("--quadrature-degree")) o.quadrature_degree = quadrature_degree;
          if (sub->count("--step")) o.step = step;
        }
        apply_overrides(config, o);
        if (certify->parsed()) return cmd_certify(config, out_dir, std::cout);
        if (simulate->parsed()) return cmd_simulate(config, control_file, out_dir, std::cout);
        if (track->parsed()) return cmd_track(config, out_dir, std::cout);
        if (optimize->parsed()) return cmd_optimize(config, out_dir, std::cout);
        return cmd_project(config, path_file, out_dir, std::cout);
      },
      std::cerr);
}
