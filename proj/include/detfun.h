/* Copyright 2026 the detfun authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the detfun shared library. The core is C++; this surface
 * exposes scenario-driven workflows and the closed-form evaluators through
 * opaque handles and status codes. Status codes match the CLI exit codes.
 */

#ifndef DETFUN_H
#define DETFUN_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum df_status {
  DF_OK = 0,
  DF_ERROR = 1,       /* unexpected failure */
  DF_ERR_CONFIG = 2,  /* invalid scenario / input */
  DF_ERR_GATE = 3,    /* sufficient-condition gate failed */
  DF_ERR_NUMERIC = 4  /* numerical failure or verification miss */
} df_status;

typedef struct df_scenario df_scenario;

/* Library version string, e.g. "0.1.0". */
const char* df_version(void);

/* Message of the last error on this thread ("" when none). */
const char* df_last_error(void);

/* Load / parse a TOML scenario. On success *out owns the handle. */
df_status df_scenario_load(const char* path, df_scenario** out);
df_status df_scenario_parse(const char* toml_text, df_scenario** out);
void df_scenario_free(df_scenario* s);

typedef struct df_run_options {
  int override_gate; /* run verify even when the gate fails */
  int workers;       /* worker threads for ensembles (>= 1) */
  int verbosity;     /* 0 quiet, 1 progress lines */
  const char* out_dir; /* NULL: the scenario's [output] dir */
} df_run_options;

void df_run_options_init(df_run_options* opts);

/* Scenario workflows; artifacts land in the output directory. */
df_status df_run_simulate(const df_scenario* s, const df_run_options* opts);
df_status df_run_defect(const df_scenario* s, const df_run_options* opts);
df_status df_run_conditions(const df_scenario* s, const df_run_options* opts);
df_status df_run_verify(const df_scenario* s, const df_run_options* opts);
df_status df_run_sweep(const df_scenario* s, const df_run_options* opts);
df_status df_run_report(const char* out_dir);

/* Closed-form condition evaluation without touching the filesystem. */
typedef struct df_condition_values {
  double eps_l;
  double tr_q;
  double tr_qa2;
  double c_e;
  double g_k;
  double h_k;
  double sigma_bound;
  double lhs31;
  double rhs31;
  double eps_threshold_noise_free;
  double eps_threshold_remark;
  int absorb_pass;
  int moment_a_pass;
  int moment_b_pass;
  int eq31_pass;
} df_condition_values;

df_status df_conditions_eval(const df_scenario* s, df_condition_values* out);

/* Completeness defect of the scenario's functional family. */
df_status df_defect_eval(const df_scenario* s, double* eps, double* c_l);

#ifdef __cplusplus
}
#endif

#endif /* DETFUN_H */
