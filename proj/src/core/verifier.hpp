// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_VERIFIER_HPP
#define DETFUN_CORE_VERIFIER_HPP

#include <cstdint>
#include <vector>

#include "core/conditions.hpp"
#include "core/dynamics.hpp"
#include "core/functionals.hpp"
#include "core/ou.hpp"

namespace detfun {

// Constants entering the damped-difference (Gronwall) bound. The bound
// constant is derived from inequality (2)'s certified C_L by the squared
// split (a+b)^2 <= (1+delta) a^2 + (1+1/delta) b^2:
//   ||w||_V^2 >= (1+delta)^{-1} eps^{-2} ||w||_H^2 - C_dl eta_L,
//   C_dl = (1+1/delta) C_L^2 eps^{-2} (1+delta)^{-1},
// and the integral term of the bound carries K = 2 c C_dl.
struct GronwallParams {
  double eps_L = 0;
  double c = 0;  // nu / 2
  double delta = 0.1;
  double c_L = 0;

  double c_delta_l() const {
    return (1.0 + 1.0 / delta) * c_L * c_L / (eps_L * eps_L) / (1.0 + delta);
  }
  double integral_constant() const { return 2.0 * c * c_delta_l(); }
  double decay_floor() const { return 2.0 * c / ((1.0 + delta) * eps_L * eps_L); }
};

// Two trajectories under one noise realization plus every per-node
// diagnostic of the difference w = u1 - u2.
struct PairTrace {
  std::uint64_t seed = 0;
  double dt = 0;
  std::vector<double> t;
  std::vector<double> w_h;   // ||w||_H
  std::vector<double> w_v;   // ||w||_V
  std::vector<double> eta;   // max_j |l_j(w)|^2
  std::vector<double> l_val; // l(u1, z) along the pair
  std::vector<double> q;     // 2 l - decay floor
  std::vector<double> u1_h, u1_v;
  // per unit window [j, j+1]: trapezoid integrals
  std::vector<double> window_eta;
  std::vector<double> window_l;
  // snapshots at integer times (index into t via unit_nodes)
  std::vector<int> unit_nodes;
  std::vector<SpectralField> u1_units, u2_units;
  IntegratorFlags flags1, flags2;
  bool complete = false;
};

/// Integrate the pair step-locked on one path and fill every diagnostic.
/// horizon must be >= 2 and lie on the path grid.
PairTrace run_pair(const SpectralField& x1, const SpectralField& x2,
                   const NoisePath& path, const FunctionalSet& L, const NSEParams& p,
                   const GronwallParams& gp, double horizon, double dt);

struct GronwallAudit {
  int violations = 0;
  double first_violation_time = 0;
  double max_excess = 0;      // worst lhs - rhs
  double min_slack = 0;       // min rhs - lhs over the horizon
  std::vector<double> bound;  // rhs per node
};

/// Pathwise audit of ||w(t)||_H^2 <= ||w(0)||^2 e^{int q} + K int e^{int q} eta;
/// trapezoid quadrature on the integrator grid, recursive form.
GronwallAudit check_gronwall(const PairTrace& trace, const GronwallParams& gp);

struct ExceedanceReport {
  std::vector<double> times;
  std::vector<double> fraction;  // P(||w(t)|| > level * ||w(0)||)
  double level_rel = 0;
  double target_fraction = 0;
  bool synchronized = false;
  double sync_time = 0;  // first time the fraction drops to the target
  double final_fraction = 1;
};

ExceedanceReport convergence_in_probability(const std::vector<PairTrace>& traces,
                                            double level_rel, double target_fraction,
                                            int node_stride);

struct Condition4Options {
  int n_paths = 16;
  int n_ics = 4;
  double m_window = 1.0;
  double dt = 1e-3;
  double t_burn = 0;
  double burn_dt = 0.01;
  double eps_margin = 0.1;
  double delta = 0.1;
  std::uint64_t base_seed = 1;
  int workers = 1;
};

struct Condition4Report {
  double lhs = 0;        // (1/m) E sup int_0^m l dt
  double threshold = 0;  // c eps_L^{-2}
  double margin = 0;
  bool pass = false;
  double implied_EQ = 0;  // 2 lhs - 2 c (1+delta)^{-1} eps^{-2}, per unit time
  int n_paths = 0, n_ics = 0;
};

/// Monte Carlo check of the expectation condition with sup over sampled
/// absorbing-sphere initial conditions.
Condition4Report empirical_condition4(const NSEParams& p, const CovarianceSpec& Q,
                                      double eps_L, const Condition4Options& opts);

struct ErgodicLedger {
  std::vector<double> increments;    // Q_j per unit interval
  std::vector<double> partial_sums;
  double mean = 0;
  double delta = 0;
  double sum_slope = 0;  // least-squares slope of the partial sums
};

/// Per-unit increments Q_j = 2 max_traj int_j^{j+1} l dt - decay floor from
/// windowed l integrals of an ensemble sharing one noise path.
ErgodicLedger build_ergodic_ledger(const std::vector<std::vector<double>>& window_l,
                                   const GronwallParams& gp);

struct SqueezeReport {
  int p_cutoff_k_sq = 0;
  int steps_total = 0;
  int projection_branch = 0;
  int contraction_branch = 0;
  std::vector<double> r_samples;
  std::vector<double> m_samples;
  std::vector<double> n_values;  // N = 2 ||P w|| at unit times
  double mean_r = 0;
  double a0 = 0;        // sqrt(first excluded A-eigenvalue of the projector)
  double eps_hw = 0;    // completeness defect for (H, W)
  bool threshold_ok = false;  // 2 a0 eps_hw < 1
  double combined = 0;        // mean_r + log(1/(1 - 2 a0 eps_hw))
  bool combined_ok = false;
};

/// Classify every unit-time pair step into the projection or contraction
/// branch (ties to projection), collect contraction exponents, unit-window
/// Lipschitz ratios and the low-mode observables.
SqueezeReport squeeze_estimate(const std::vector<PairTrace>& traces, int p_cutoff_k_sq,
                               double eps_hw);

/// ||P u||_H for the spectral projector onto modes |k|^2 <= cutoff.
double projector_norm(const SpectralField& u, int cutoff_k_sq);

struct IterationBoundRoutes {
  std::vector<double> recursion;    // d_m <= N(m) + e^{R_{m-1}} d_{m-1}
  std::vector<double> closed_form;  // d_0 e^{sum R} + sum_j N(m-j) e^{tail sums}
};

/// Both routes of the unit-time iteration bound; N_seq holds N(1..M),
/// r_integrals the per-unit integrals of r.
IterationBoundRoutes iteration_bound_routes(double d0, const std::vector<double>& n_seq,
                                       const std::vector<double>& r_integrals);

struct ConjugacyReport {
  // max over unit snapshots and coefficients of |(v1 - v2) - (u1 - u2)|,
  // with the v-difference formed through the additive transform (the
  // shared z cancels before any rounding) -- exactly zero.
  double identity_residual = 0;
  // the same residual with v1, v2 materialized as u + z first; rounding
  // noise, reported for scale.
  double materialized_residual = 0;
  bool eta_match = false;  // eta_L identical between the two difference paths
  int snapshots_checked = 0;
};

/// Difference of the conjugated pair T^{-1}(u1) - T^{-1}(u2); the additive
/// shift by z cancels algebraically, so this is u1 - u2 with no rounding
/// from z.
SpectralField conjugated_difference(const SpectralField& u1, const SpectralField& u2,
                                    const SpectralField& z);

ConjugacyReport conjugacy_transfer(const PairTrace& trace, const NoisePath& path,
                                   const FunctionalSet& L);

/// Spearman rank correlation (trend diagnostic for windowed statistics).
double spearman_rho(const std::vector<double>& values);

}  // namespace detfun

#endif
