// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_RUNNER_HPP
#define DETFUN_CORE_RUNNER_HPP

#include <string>

#include "core/conditions.hpp"
#include "core/scenario.hpp"

namespace detfun {

struct RunOptions {
  std::string out_dir;  // empty: scenario's [output] dir
  bool override_gate = false;
  int workers = 1;
  int verbosity = 0;
};

// Scenario-driven workflows behind the CLI subcommands. Each writes its
// artifacts plus a manifest under the output directory and throws
// ConfigError / GateError / NumericError for the 2 / 3 / 4 exit paths.
void run_simulate(const Scenario& s, const RunOptions& opts);
void run_defect(const Scenario& s, const RunOptions& opts);
ConditionReport run_conditions(const Scenario& s, const RunOptions& opts);
void run_verify(const Scenario& s, const RunOptions& opts);
void run_sweep(const Scenario& s, const RunOptions& opts);
void run_report(const std::string& out_dir);

/// Condition evaluation without touching the filesystem (drives the
/// defect machinery for eps_L, then the closed forms).
ConditionReport evaluate_conditions(const Scenario& s);

struct DefectSummary {
  double eps = 0;
  double c_l = 0;
  double analytic = 0;  // NaN when no closed form applies
  int k_functionals = 0;
  int truncation_n_max = 0;
};

DefectSummary evaluate_defect(const Scenario& s);

}  // namespace detfun

#endif
