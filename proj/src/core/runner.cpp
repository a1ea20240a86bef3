// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/thread_pool.hpp"
#include "core/verifier.hpp"

namespace detfun {

namespace {

std::string out_path(const Scenario& s, const RunOptions& opts, const std::string& name) {
  const std::string dir = opts.out_dir.empty() ? s.out_dir : opts.out_dir;
  ensure_dir(dir);
  return dir + "/" + name;
}

void write_condition_csv(const std::string& path, const ConditionReport& rep) {
  CsvWriter csv(path,
                {"nu", "kappa", "lambda1", "f_vdual_sq", "tr_q", "tr_qa2", "c_e", "a0",
                 "a1", "eps_L", "m_window", "absorb_margin", "moment_a_margin",
                 "moment_b_margin", "g_k", "h_k", "sigma_bound", "lhs31", "rhs31",
                 "eq31_pass", "eps_threshold_noise_free", "eps_threshold_remark"});
  const ModelConstants& c = rep.constants;
  csv.row_numeric({c.nu, c.kappa, c.lambda1, c.f_vdual_sq, c.trQ, c.trQA2, c.c_E, c.a0,
                   c.a1, c.eps_L, c.m_window, rep.admissibility.absorb_margin,
                   rep.admissibility.moment_a_margin, rep.admissibility.moment_b_margin,
                   rep.g, rep.h, rep.sigma, rep.lhs31, rep.rhs31,
                   rep.eq31_pass ? 1.0 : 0.0, rep.eps_threshold_noise_free,
                   rep.eps_threshold_remark});
}

void print_condition_table(const ConditionReport& rep, int verbosity) {
  const ModelConstants& c = rep.constants;
  std::printf("condition report\n");
  std::printf("  %-26s %s\n", "nu", format_double(c.nu).c_str());
  std::printf("  %-26s %s\n", "kappa", format_double(c.kappa).c_str());
  std::printf("  %-26s %s\n", "tr_H Q", format_double(c.trQ).c_str());
  std::printf("  %-26s %s\n", "tr_H QA^2", format_double(c.trQA2).c_str());
  std::printf("  %-26s %s\n", "||f||_V'^2", format_double(c.f_vdual_sq).c_str());
  std::printf("  %-26s %s\n", "c_E", format_double(c.c_E).c_str());
  std::printf("  %-26s %s\n", "eps_L", format_double(c.eps_L).c_str());
  std::printf("  %-26s %s (margin %s)\n", "absorbing admissibility",
              rep.admissibility.absorb_pass ? "pass" : "FAIL",
              format_double(rep.admissibility.absorb_margin).c_str());
  std::printf("  %-26s %s (margin %s)\n", "kappa moment (strict)",
              rep.admissibility.moment_a_pass ? "pass" : "FAIL",
              format_double(rep.admissibility.moment_a_margin).c_str());
  std::printf("  %-26s %s (margin %s)\n", "kappa moment (squared)",
              rep.admissibility.moment_b_pass ? "pass" : "FAIL",
              format_double(rep.admissibility.moment_b_margin).c_str());
  std::printf("  %-26s %s\n", "g_kappa", format_double(rep.g).c_str());
  std::printf("  %-26s %s\n", "h_kappa", format_double(rep.h).c_str());
  std::printf("  %-26s %s\n", "sigma bound", format_double(rep.sigma).c_str());
  std::printf("  %-26s %s < %s : %s\n", "main condition", format_double(rep.lhs31).c_str(),
              format_double(rep.rhs31).c_str(), rep.eq31_pass ? "pass" : "FAIL");
  if (verbosity > 0) std::printf("  notes: %s\n", rep.notes.c_str());
}

}  // namespace

ConditionReport evaluate_conditions(const Scenario& s) {
  // eps_L entering the gate is always the (V, H) defect; the scenario's
  // display pair only affects the defect subcommand.
  const FunctionalSet family = s.make_functionals();
  const DefectReport defect =
      completeness_defect(family, SpacePair::VH(), s.make_truncation_grid());
  return main_condition(s.make_constants(defect.eps));
}

DefectSummary evaluate_defect(const Scenario& s) {
  const FunctionalSet family = s.make_functionals();
  const SpacePair pair = s.make_pair();
  const GridPtr truncation = s.make_truncation_grid();
  const DefectReport rep = completeness_defect(family, pair, truncation);
  DefectSummary out;
  out.eps = rep.eps;
  out.c_l = rep.c_l;
  out.k_functionals = family.size();
  out.truncation_n_max = rep.truncation_n_max;
  out.analytic = std::numeric_limits<double>::quiet_NaN();
  if (family.kind() == FunctionalKind::modes) {
    try {
      out.analytic = modes_defect_analytic(family.mode_cutoff_k_sq(), pair);
    } catch (const ConfigError&) {
      // unsupported pair: no closed form
    }
  }
  return out;
}

void run_simulate(const Scenario& s, const RunOptions& opts) {
  GridPtr grid = s.make_grid_ptr();
  const CovarianceSpec q = s.make_covariance(grid);
  const NSEParams params = s.make_params(grid);

  RealizationSpec rspec;
  rspec.t_end = s.t_end;
  rspec.dt = s.dt;
  rspec.t_burn = s.effective_t_burn();
  rspec.burn_dt = s.burn_dt;
  rspec.eps_margin = s.eps_margin;
  const Realization real = make_realization(params, q, rspec, s.seed);

  const SpectralField x0 = s.make_initial_condition(grid, real.r0, s.seed, 0);

  IntegrateOptions iopts;
  iopts.snapshot_stride = s.snapshot_stride;
  const Trajectory traj =
      integrate_transformed(x0, real.forward, params, s.t_end, s.dt, 0.0, iopts);

  Manifest manifest(s.source_text);
  {
    CsvWriter csv(out_path(s, opts, "trajectory.csv"),
                  {"t", "u_h", "u_v", "u_vdual", "r_sq"});
    for (int i = 0; i < traj.nodes(); ++i) {
      const NormBundle& n = traj.norm_at(i);
      csv.row_numeric({traj.time(i), n.h, n.v, n.v_dual, real.radius.r_sq_at(traj.time(i))});
    }
  }
  manifest.add("trajectory.csv", out_path(s, opts, "trajectory.csv"));

  for (int si = 0; si < traj.snapshot_count(); ++si) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06d.csv", traj.snapshot_node(si));
    const std::string path = out_path(s, opts, name);
    write_snapshot_file(path, traj.snapshot(si), traj.time(traj.snapshot_node(si)));
    manifest.add(name, path);
  }

  if (opts.verbosity >= 2) {
    // full driving-noise record, one line per node
    const std::string path = out_path(s, opts, "noise_path.ndjson");
    std::ofstream nd(path);
    const SpectralGrid& g = *grid;
    for (int i = 0; i <= real.forward.steps(); ++i) {
      nlohmann::json rec;
      rec["t"] = real.forward.time(i);
      nlohmann::json zmodes = nlohmann::json::array();
      const SpectralField& z = real.forward.z(i);
      for (int m = 0; m < g.canonical_count(); ++m) {
        const Complex psi = z.amplitude(m);
        zmodes.push_back({g.mode(m).k1, g.mode(m).k2, psi.real(), psi.imag()});
      }
      rec["z"] = std::move(zmodes);
      nd << rec.dump() << "\n";
    }
    manifest.add("noise_path.ndjson", path);
  }
  manifest.write(out_path(s, opts, "manifest.csv"));

  if (opts.verbosity > 0) {
    const NormBundle& nf = traj.norm_at(traj.nodes() - 1);
    std::printf("simulate: %d nodes, final ||u||_H = %s, R^2(0) = %s\n", traj.nodes(),
                format_double(nf.h).c_str(),
                format_double(real.radius.r_sq_at(0.0)).c_str());
  }
  if (traj.flags().aborted) {
    std::ostringstream msg;
    msg << "simulate: integration aborted (non-finite state) at t = "
        << traj.flags().last_valid_time << "; partial outputs written";
    throw NumericError(msg.str());
  }
}

void run_defect(const Scenario& s, const RunOptions& opts) {
  const FunctionalSet family = s.make_functionals();
  const SpacePair pair = s.make_pair();
  const GridPtr truncation = s.make_truncation_grid();
  const DefectReport rep = completeness_defect(family, pair, truncation);
  const DefectSummary summary = evaluate_defect(s);

  Manifest manifest(s.source_text);
  {
    CsvWriter csv(out_path(s, opts, "defect.csv"),
                  {"kind", "k", "eps", "c_L", "truncation", "analytic"});
    csv.row({s.functional_kind, std::to_string(family.size()), format_double(rep.eps),
             format_double(rep.c_l), std::to_string(rep.truncation_n_max),
             format_double(summary.analytic)});
  }
  manifest.add("defect.csv", out_path(s, opts, "defect.csv"));
  if (rep.maximizer) {
    const std::string path = out_path(s, opts, "defect_maximizer.csv");
    write_snapshot_file(path, *rep.maximizer, 0.0);
    manifest.add("defect_maximizer.csv", path);
  }
  manifest.write(out_path(s, opts, "manifest.csv"));

  if (opts.verbosity >= 0)
    std::printf("defect: kind=%s k=%d eps=%s c_L=%s truncation=%d\n",
                s.functional_kind.c_str(), family.size(), format_double(rep.eps).c_str(),
                format_double(rep.c_l).c_str(), rep.truncation_n_max);
}

ConditionReport run_conditions(const Scenario& s, const RunOptions& opts) {
  const ConditionReport rep = evaluate_conditions(s);
  Manifest manifest(s.source_text);
  write_condition_csv(out_path(s, opts, "conditions.csv"), rep);
  manifest.add("conditions.csv", out_path(s, opts, "conditions.csv"));
  manifest.write(out_path(s, opts, "manifest.csv"));
  print_condition_table(rep, opts.verbosity);
  if (!rep.eq31_pass)
    throw GateError("conditions: the main sufficient condition fails (lhs " +
                    format_double(rep.lhs31) + " >= rhs " + format_double(rep.rhs31) +
                    ")");
  return rep;
}

void run_verify(const Scenario& s, const RunOptions& opts) {
  ConditionReport cond;
  bool gate_ok = true;
  try {
    cond = run_conditions(s, opts);
  } catch (const GateError&) {
    gate_ok = false;
    if (!opts.override_gate) throw;
    cond = evaluate_conditions(s);
  }

  GridPtr grid = s.make_grid_ptr();
  const CovarianceSpec q = s.make_covariance(grid);
  const NSEParams params = s.make_params(grid);
  const FunctionalSet family = s.make_functionals();

  // Gronwall constants always come from the (V, H) defect machinery.
  const DefectReport vh = completeness_defect(family, SpacePair::VH(),
                                              s.make_truncation_grid());
  GronwallParams gp;
  gp.eps_L = vh.eps;
  gp.c = 0.5 * s.nu;
  gp.delta = s.delta;
  gp.c_L = vh.c_l;

  RealizationSpec rspec;
  rspec.t_end = s.t_end;
  rspec.dt = s.dt;
  rspec.t_burn = s.effective_t_burn();
  rspec.burn_dt = s.burn_dt;
  rspec.eps_margin = s.eps_margin;

  std::vector<PairTrace> traces(static_cast<std::size_t>(s.n_pairs));
  parallel_for(s.n_pairs, opts.workers, [&](int i) {
    const std::uint64_t pair_seed = s.seed + static_cast<std::uint64_t>(i);
    const Realization real = make_realization(params, q, rspec, pair_seed);
    const SpectralField x1 = s.make_initial_condition(grid, real.r0, pair_seed, 0);
    const SpectralField x2 = s.make_initial_condition(grid, real.r0, pair_seed, 1);
    traces[static_cast<std::size_t>(i)] =
        run_pair(x1, x2, real.forward, family, params, gp, s.t_end, s.dt);
  });

  Manifest manifest(s.source_text);
  int violations_total = 0;
  std::vector<GronwallAudit> audits;
  audits.reserve(traces.size());
  {
    std::ofstream nd(out_path(s, opts, "verify_pairs.ndjson"));
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const PairTrace& tr = traces[i];
      const GronwallAudit audit = check_gronwall(tr, gp);
      violations_total += audit.violations;
      nlohmann::json rec;
      rec["pair"] = i;
      rec["seed"] = tr.seed;
      rec["complete"] = tr.complete;
      rec["w_h_initial"] = tr.w_h.front();
      rec["w_h_final"] = tr.w_h.back();
      rec["gronwall_violations"] = audit.violations;
      rec["gronwall_min_slack"] = audit.min_slack;
      rec["window_eta"] = tr.window_eta;
      nd << rec.dump() << "\n";
      audits.push_back(audit);
    }
  }
  manifest.add("verify_pairs.ndjson", out_path(s, opts, "verify_pairs.ndjson"));

  const int steps_per_unit = static_cast<int>(std::lround(1.0 / s.dt));
  const ExceedanceReport exceed = convergence_in_probability(
      traces, s.delta_level, s.target_fraction, steps_per_unit);
  {
    CsvWriter csv(out_path(s, opts, "summary.csv"),
                  {"time", "exceedance_fraction", "mean_eta_window",
                   "gronwall_violations"});
    const std::size_t n_windows = traces.front().window_eta.size();
    for (std::size_t j = 0; j < n_windows; ++j) {
      double mean_eta = 0;
      for (const auto& tr : traces) mean_eta += tr.window_eta[j];
      mean_eta /= static_cast<double>(traces.size());
      // exceedance at the window's right edge
      const double t_right = static_cast<double>(j + 1);
      double frac = 1.0;
      for (std::size_t ti = 0; ti < exceed.times.size(); ++ti)
        if (std::abs(exceed.times[ti] - t_right) < 0.5) frac = exceed.fraction[ti];
      csv.row_numeric({t_right, frac, mean_eta, static_cast<double>(violations_total)});
    }
  }
  manifest.add("summary.csv", out_path(s, opts, "summary.csv"));
  manifest.write(out_path(s, opts, "manifest.csv"));

  if (opts.verbosity > 0)
    std::printf(
        "verify: %d pairs, %d gronwall violations, final exceedance %s, sync time %s\n",
        s.n_pairs, violations_total, format_double(exceed.final_fraction).c_str(),
        exceed.synchronized ? format_double(exceed.sync_time).c_str() : "none");

  if (!gate_ok && opts.verbosity >= 0)
    std::printf("verify: gate overridden; results are outside the guarantee\n");

  if (violations_total > 0 || exceed.final_fraction > s.target_fraction) {
    std::ostringstream msg;
    msg << "verify: " << violations_total << " bound violations, final exceedance "
        << exceed.final_fraction << " (target " << s.target_fraction << ")";
    throw NumericError(msg.str());
  }
}

void run_sweep(const Scenario& s, const RunOptions& opts) {
  if (s.sweep_parameter.empty())
    throw ConfigError("sweep: scenario lacks a [sweep] block with parameter/values");
  Manifest manifest(s.source_text);
  CsvWriter csv(out_path(s, opts, "sweep.csv"),
                {"parameter", "value", "eps_L", "g_k", "h_k", "sigma_bound", "lhs31",
                 "rhs31", "eq31_pass"});
  for (double v : s.sweep_values) {
    Scenario variant = s;
    if (s.sweep_parameter == "kappa")
      variant.kappa = v;
    else if (s.sweep_parameter == "sigma2")
      variant.sigma2 = v;
    else
      variant.mode_cutoff = static_cast<int>(v);
    const ConditionReport rep = evaluate_conditions(variant);
    csv.row({s.sweep_parameter, format_double(v), format_double(rep.constants.eps_L),
             format_double(rep.g), format_double(rep.h), format_double(rep.sigma),
             format_double(rep.lhs31), format_double(rep.rhs31),
             rep.eq31_pass ? "1" : "0"});
  }
  csv.close();
  manifest.add("sweep.csv", out_path(s, opts, "sweep.csv"));
  manifest.write(out_path(s, opts, "manifest.csv"));
}

void run_report(const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(out_dir))
    throw ConfigError("report: not a directory: " + out_dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 4 && name.substr(name.size() - 4) == ".csv" && name != "long.csv" &&
        name != "manifest.csv" && name.rfind("snapshot_", 0) != 0 &&
        name != "defect_maximizer.csv")
      names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  CsvWriter csv(out_dir + "/long.csv", {"source", "row", "column", "value"});
  for (const std::string& name : names) {
    std::ifstream is(out_dir + "/" + name);
    std::string line;
    std::vector<std::string> header;
    int row = 0;
    while (std::getline(is, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (header.empty()) {
        header = cells;
        continue;
      }
      for (std::size_t c = 0; c < cells.size() && c < header.size(); ++c)
        csv.row({name, std::to_string(row), header[c], cells[c]});
      ++row;
    }
  }
}

}  // namespace detfun
