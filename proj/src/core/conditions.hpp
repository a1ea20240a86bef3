// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_CONDITIONS_HPP
#define DETFUN_CORE_CONDITIONS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/covariance.hpp"
#include "core/dynamics.hpp"
#include "core/field.hpp"

namespace detfun {

// Closed-form inputs of the sufficient conditions: viscosity, OU control
// parameter, first eigenvalue of -Laplace, squared V'-norm of the
// forcing, covariance traces, the D(A^{3/2}) -> W^1_inf embedding norm,
// the two absolute constants of the g_kappa formula, completeness defect
// and averaging window. The Gronwall rate constant is nu/2 throughout.
struct ModelConstants {
  double nu = 1.0;
  double kappa = 0.0;
  double lambda1 = 1.0;
  double f_vdual_sq = 0.0;
  double trQ = 0.0;
  double trQA2 = 0.0;
  double c_E = 0.0;
  double a0 = 1.0;
  double a1 = 1.0;
  double eps_L = 0.0;
  double m_window = 1.0;

  double gronwall_c() const { return 0.5 * nu; }
  void validate() const;
};

struct AdmissibilityReport {
  // lambda1 > 4 trQ / ((kappa+1) nu^3)
  bool absorb_pass = false;
  double absorb_margin = 0;
  // lambda1 > 16 trQ / ((kappa+1) nu^3)
  bool moment_a_pass = false;
  double moment_a_margin = 0;
  // lambda1 >= 256 trQ / ((kappa+1)^2 nu^3)
  bool moment_b_pass = false;
  double moment_b_margin = 0;

  bool all() const { return absorb_pass && moment_a_pass && moment_b_pass; }
};

AdmissibilityReport check_admissibility(const ModelConstants& c);

/// g_kappa = a0 (trQ/nu) (kappa + a1 trQ / ((kappa+1)^2 lambda1 nu^3)).
double g_k(const ModelConstants& c);

/// h_kappa = 2 c_E ([trQA2]^2 / (nu^3 lambda1^3 (kappa+1)
///                  [nu^3 lambda1 (kappa+1) - 16 trQ]))^{1/4};
/// the bracket must be positive (the kappa moment condition), else rejected.
double h_k(const ModelConstants& c);

/// Sigma bound ((4/nu^2) ||f||_{V'}^2 + g_kappa)(1 + h_kappa).
double sigma_bound(const ModelConstants& c);

struct ConditionReport {
  ModelConstants constants;
  AdmissibilityReport admissibility;
  double g = 0, h = 0, sigma = 0;
  double lhs31 = 0;  // (4/nu) sigma + 2 trQ / ((kappa+1) nu)
  double rhs31 = 0;  // nu / eps_L^2
  bool eq31_pass = false;
  double eps_threshold_noise_free = 0;  // nu^2 / (4 ||f||_{V'}), zero-noise algebra
  double eps_threshold_remark = 0;      // 4 nu^2 / ||f||_{V'}, literature variant
  std::string notes;
};

ConditionReport main_condition(const ModelConstants& c);

/// Embedding norm of D(A^{3/2}) into W^1_inf on the truncation:
/// sup of max(|u(x)|, |grad u(x)|_F) over the unit ||A^{3/2} u||_H ball.
/// Translation invariance and Riesz duality reduce the sup to top
/// eigenvalues of small mode-sum Gram matrices, evaluated exactly here;
/// the result under-estimates the infinite-lattice norm (sup over a
/// subspace).
double estimate_c_E(const SpectralGrid& grid);

struct SigmaMcOptions {
  int n_paths = 16;
  int n_ics = 4;
  double m_window = 1.0;
  double dt = 1e-3;
  double t_burn = 0;  // 0: default
  double burn_dt = 0.01;
  double eps_margin = 0.1;
  std::uint64_t base_seed = 1;
  int workers = 1;
  bool skip_gate = false;  // tests only: run outside admissibility
};

struct SigmaMcResult {
  double sup_integral_mean = 0;  // E sup_x int_0^m ||u||_V^2
  double sigma_estimate = 0;     // divided by the window
  double combination32 = 0;      // (4/(nu m)) E sup int + (4/nu) E ||z||_V^2
  int n_paths = 0;
  int n_ics = 0;
};

/// Monte Carlo estimate of the windowed V-norm supremum statistic; the
/// expectation term uses the closed-form stationary OU moment.
SigmaMcResult estimate_sigma_mc(const NSEParams& p, const CovarianceSpec& Q,
                                const SigmaMcOptions& opts);

struct RMomentsOptions {
  int n_paths = 64;
  double t_burn = 0;
  double burn_dt = 0.01;
  double eps_margin = 0.1;
  std::uint64_t base_seed = 1;
  int workers = 1;
};

struct RMomentsResult {
  double m2 = 0, m4 = 0, m8 = 0;      // E R^2, E R^4, E R^8
  bool stable2 = false, stable4 = false, stable8 = false;  // half-vs-full < 20%
  int n_paths = 0;
};

/// Empirical moments of the absorbing radius over independent pullback
/// realizations; refuses to run when the kappa moment conditions fail.
RMomentsResult estimate_R_moments(const NSEParams& p, const CovarianceSpec& Q,
                                  const RMomentsOptions& opts);

}  // namespace detfun

#endif
