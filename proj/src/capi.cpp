// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "detfun.h"

#include <string>

#include "core/errors.hpp"
#include "core/runner.hpp"
#include "core/scenario.hpp"

namespace {

thread_local std::string g_last_error;

df_status to_status(const detfun::Error& e) {
  switch (e.code()) {
    case detfun::ErrorCode::config:
      return DF_ERR_CONFIG;
    case detfun::ErrorCode::gate:
      return DF_ERR_GATE;
    case detfun::ErrorCode::numeric:
      return DF_ERR_NUMERIC;
    default:
      return DF_ERROR;
  }
}

template <typename Fn>
df_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DF_OK;
  } catch (const detfun::Error& e) {
    g_last_error = e.what();
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DF_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return DF_ERROR;
  }
}

detfun::RunOptions to_run_options(const df_run_options* opts) {
  detfun::RunOptions ro;
  if (opts) {
    ro.override_gate = opts->override_gate != 0;
    ro.workers = opts->workers > 0 ? opts->workers : 1;
    ro.verbosity = opts->verbosity;
    if (opts->out_dir) ro.out_dir = opts->out_dir;
  }
  return ro;
}

}  // namespace

struct df_scenario {
  detfun::Scenario impl;
};

extern "C" {

const char* df_version(void) { return "0.1.0"; }

const char* df_last_error(void) { return g_last_error.c_str(); }

df_status df_scenario_load(const char* path, df_scenario** out) {
  if (!path || !out) {
    g_last_error = "df_scenario_load: null argument";
    return DF_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded([&] { *out = new df_scenario{detfun::Scenario::load(path)}; });
}

df_status df_scenario_parse(const char* toml_text, df_scenario** out) {
  if (!toml_text || !out) {
    g_last_error = "df_scenario_parse: null argument";
    return DF_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded([&] { *out = new df_scenario{detfun::Scenario::parse(toml_text)}; });
}

void df_scenario_free(df_scenario* s) { delete s; }

void df_run_options_init(df_run_options* opts) {
  if (!opts) return;
  opts->override_gate = 0;
  opts->workers = 1;
  opts->verbosity = 0;
  opts->out_dir = nullptr;
}

df_status df_run_simulate(const df_scenario* s, const df_run_options* opts) {
  if (!s) return DF_ERR_CONFIG;
  return guarded([&] { detfun::run_simulate(s->impl, to_run_options(opts)); });
}

df_status df_run_defect(const df_scenario* s, const df_run_options* opts) {
  if (!s) return DF_ERR_CONFIG;
  return guarded([&] { detfun::run_defect(s->impl, to_run_options(opts)); });
}

df_status df_run_conditions(const df_scenario* s, const df_run_options* opts) {
  if (!s) return DF_ERR_CONFIG;
  return guarded([&] { detfun::run_conditions(s->impl, to_run_options(opts)); });
}

df_status df_run_verify(const df_scenario* s, const df_run_options* opts) {
  if (!s) return DF_ERR_CONFIG;
  return guarded([&] { detfun::run_verify(s->impl, to_run_options(opts)); });
}

df_status df_run_sweep(const df_scenario* s, const df_run_options* opts) {
  if (!s) return DF_ERR_CONFIG;
  return guarded([&] { detfun::run_sweep(s->impl, to_run_options(opts)); });
}

df_status df_run_report(const char* out_dir) {
  if (!out_dir) return DF_ERR_CONFIG;
  return guarded([&] { detfun::run_report(out_dir); });
}

df_status df_conditions_eval(const df_scenario* s, df_condition_values* out) {
  if (!s || !out) return DF_ERR_CONFIG;
  return guarded([&] {
    const detfun::ConditionReport rep = detfun::evaluate_conditions(s->impl);
    out->eps_l = rep.constants.eps_L;
    out->tr_q = rep.constants.trQ;
    out->tr_qa2 = rep.constants.trQA2;
    out->c_e = rep.constants.c_E;
    out->g_k = rep.g;
    out->h_k = rep.h;
    out->sigma_bound = rep.sigma;
    out->lhs31 = rep.lhs31;
    out->rhs31 = rep.rhs31;
    out->eps_threshold_noise_free = rep.eps_threshold_noise_free;
    out->eps_threshold_remark = rep.eps_threshold_remark;
    out->absorb_pass = rep.admissibility.absorb_pass ? 1 : 0;
    out->moment_a_pass = rep.admissibility.moment_a_pass ? 1 : 0;
    out->moment_b_pass = rep.admissibility.moment_b_pass ? 1 : 0;
    out->eq31_pass = rep.eq31_pass ? 1 : 0;
  });
}

df_status df_defect_eval(const df_scenario* s, double* eps, double* c_l) {
  if (!s || !eps || !c_l) return DF_ERR_CONFIG;
  return guarded([&] {
    const detfun::DefectSummary sum = detfun::evaluate_defect(s->impl);
    *eps = sum.eps;
    *c_l = sum.c_l;
  });
}

}  // extern "C"
