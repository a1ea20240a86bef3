// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Links only the C API of the shared library.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

#include "detfun.h"

namespace {

struct ScenarioHandle {
  df_scenario* ptr = nullptr;
  ~ScenarioHandle() { df_scenario_free(ptr); }
};

int finish(df_status status, const char* cmd) {
  if (status != DF_OK) std::fprintf(stderr, "detfun %s: %s\n", cmd, df_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"determining-functionals toolkit for the stochastic 2D Navier-Stokes "
               "equations"};
  app.set_version_flag("--version", std::string(df_version()));
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  bool override_gate = false;
  int workers = 1;
  int verbosity = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario)
      cmd->add_option("--scenario", scenario_path, "scenario TOML file")->required();
    cmd->add_option("--out", out_dir, "output directory (default: scenario [output] dir)");
    cmd->add_option("--workers", workers, "worker threads for ensembles");
    cmd->add_option("--verbosity", verbosity, "0 quiet, 1 progress");
  };

  CLI::App* c_sim = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(c_sim, true);
  CLI::App* c_def = app.add_subcommand("defect", "completeness defect of the family");
  add_common(c_def, true);
  CLI::App* c_cond = app.add_subcommand("conditions", "evaluate the sufficient conditions");
  add_common(c_cond, true);
  CLI::App* c_ver = app.add_subcommand("verify", "pairwise determining-property runs");
  add_common(c_ver, true);
  c_ver->add_flag("--override-gate", override_gate,
                  "run even when the condition gate fails");
  CLI::App* c_sweep = app.add_subcommand("sweep", "condition sweep over a parameter");
  add_common(c_sweep, true);
  CLI::App* c_rep = app.add_subcommand("report", "melt output CSVs into long format");
  c_rep->add_option("--out", out_dir, "output directory to aggregate")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(c_rep)) return finish(df_run_report(out_dir.c_str()), "report");

  ScenarioHandle scenario;
  const df_status load = df_scenario_load(scenario_path.c_str(), &scenario.ptr);
  if (load != DF_OK) return finish(load, "scenario");

  df_run_options opts;
  df_run_options_init(&opts);
  opts.override_gate = override_gate ? 1 : 0;
  opts.workers = workers;
  opts.verbosity = verbosity;
  opts.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();

  if (app.got_subcommand(c_sim))
    return finish(df_run_simulate(scenario.ptr, &opts), "simulate");
  if (app.got_subcommand(c_def))
    return finish(df_run_defect(scenario.ptr, &opts), "defect");
  if (app.got_subcommand(c_cond))
    return finish(df_run_conditions(scenario.ptr, &opts), "conditions");
  if (app.got_subcommand(c_ver))
    return finish(df_run_verify(scenario.ptr, &opts), "verify");
  if (app.got_subcommand(c_sweep))
    return finish(df_run_sweep(scenario.ptr, &opts), "sweep");
  return 1;
}
