// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_DYNAMICS_HPP
#define DETFUN_CORE_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/covariance.hpp"
#include "core/field.hpp"
#include "core/ou.hpp"
#include "core/transform.hpp"

namespace detfun {

// Model parameters of the transformed random 2D Navier-Stokes system
//   du/dt = -2 nu A u - P[((u+z).grad)(u+z)] + 2 nu kappa A z + f,
// with A = -Laplace/2 and f a fixed divergence-free forcing.
struct NSEParams {
  double nu = 1.0;
  double kappa = 0.0;
  SpectralField forcing;

  NSEParams(double nu_, double kappa_, SpectralField forcing_);
  const SpectralGrid& grid() const { return forcing.grid(); }
  double lambda1() const { return forcing.grid().lambda1(); }
  OUParams ou() const { return {kappa, nu}; }
};

struct IntegratorFlags {
  bool cfl_flagged = false;
  double first_cfl_time = 0;
  bool aborted = false;
  double last_valid_time = 0;
};

struct Provenance {
  std::uint64_t seed = 0;
  double dt = 0;
  std::string scheme;
};

// Time-stamped diagnostics of one integration, with field snapshots at a
// configurable stride (first and last node always kept).
class Trajectory {
 public:
  Trajectory() = default;

  void reserve(int n_nodes);
  void push_node(double t, const NormBundle& n);
  void push_snapshot(int node_index, SpectralField u);

  int nodes() const { return static_cast<int>(times_.size()); }
  double time(int i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  const NormBundle& norm_at(int i) const { return norms_[i]; }

  int snapshot_count() const { return static_cast<int>(snapshots_.size()); }
  int snapshot_node(int s) const { return snapshots_[s].first; }
  const SpectralField& snapshot(int s) const { return snapshots_[s].second; }
  /// Snapshot at a node index; rejects nodes without one.
  const SpectralField& snapshot_at_node(int node_index) const;
  const SpectralField& final_snapshot() const;

  IntegratorFlags& flags() { return flags_; }
  const IntegratorFlags& flags() const { return flags_; }
  Provenance& provenance() { return prov_; }
  const Provenance& provenance() const { return prov_; }

 private:
  std::vector<double> times_;
  std::vector<NormBundle> norms_;
  std::vector<std::pair<int, SpectralField>> snapshots_;
  IntegratorFlags flags_;
  Provenance prov_;
};

/// Full right side of the transformed equation at state (u, z).
SpectralField transformed_rhs(const SpectralField& u, const SpectralField& z,
                              const NSEParams& p);

/// Lipschitz-rate function l(x1, x2, omega) = (2/nu)(||x1||_V^2 + ||z||_V^2).
double lipschitz_l(const SpectralField& u1, const SpectralField& z, double nu);

// One step of the semi-implicit scheme: the full linear term -2 nu A is
// integrated exactly per mode, everything else explicit (Lawson-Euler).
// Heat/OU decay of single modes is therefore exact, which the
// deterministic-limit oracles rely on.
class TransformedStepper {
 public:
  TransformedStepper(const NSEParams& p, double dt);
  SpectralField step(const SpectralField& u, const SpectralField& z);
  /// Advective stability heuristic dt * sup|u+z| * n_max (l1 bound).
  double cfl_number(const SpectralField& u, const SpectralField& z) const;
  double dt() const { return dt_; }

 private:
  const NSEParams& p_;
  double dt_;
  std::vector<double> decay_;  // e^{-2 nu a_k dt}
  NonlinearWorkspace ws_;
};

// Euler-Maruyama step for the SPDE dv = (nu Laplace v - (v.grad)v + f) dt + dw
// with the same exact per-mode viscous factor; consumes stored Wiener
// increments. Independent cross-check target for the conjugation.
class DirectStepper {
 public:
  DirectStepper(const NSEParams& p, double dt);
  SpectralField step(const SpectralField& v, const SpectralField& dw);
  double cfl_number(const SpectralField& v) const;

 private:
  const NSEParams& p_;
  double dt_;
  std::vector<double> decay_;
  NonlinearWorkspace ws_;
};

struct IntegrateOptions {
  int snapshot_stride = 0;  // 0: first and last only
  double cfl_limit = 1.0;
  /// Called after every accepted node (including the initial one).
  std::function<void(int node, double t, const SpectralField& u)> observer;
};

/// Integrate the transformed system from x0 at t_start (a path node)
/// until t_end. dt must equal the path spacing. Aborts (flagged, partial
/// data kept) on non-finite states.
Trajectory integrate_transformed(const SpectralField& x0, const NoisePath& path,
                                 const NSEParams& p, double t_end, double dt,
                                 double t_start = 0.0, const IntegrateOptions& opts = {});

/// Integrate the SPDE directly from v0 using the path's stored increments.
Trajectory integrate_sns_direct(const SpectralField& v0, const NoisePath& path,
                                const NSEParams& p, double t_end, double dt,
                                double t_start = 0.0, const IntegrateOptions& opts = {});

/// Conjugated trajectory v = u + z(theta_t omega), materialized at the
/// snapshot nodes of traj_u (claimed solution of the SPDE).
Trajectory conjugate(const Trajectory& traj_u, const NoisePath& path);

// Stationary absorbing radius: R^2(t) = (1+eps) rho(t) with rho the pullback
// solution of d rho/dt + nu lambda1 rho = (8/nu) rho ||z||_V^2 + m(theta_t).
struct RadiusPath {
  std::vector<double> times;
  std::vector<double> r_sq;    // (1+eps) rho
  std::vector<double> m_vals;  // m(theta_t omega)
  double eps_margin = 0;
  double t_burn = 0;
  bool admissibility_ok = true;  // lambda1 > 4 trQ / ((kappa+1) nu^3)

  double r_sq_at(double t) const;
};

/// m(omega) = (4/nu) ((2/lambda1)||z||_V^4 + kappa^2 nu^2 ||z||_V^2 + ||f||_{V'}^2).
double radius_drive_m(const SpectralField& z, const NSEParams& p);

/// Pullback radius over one stored path starting at its first node
/// (rho(t0) = 0); values are converged for t >= t0 + t_burn.
RadiusPath radius_path(const NoisePath& path, const CovarianceSpec& Q,
                       const NSEParams& p, double eps, double t_burn);

/// Burn-in on a coarse past segment joined to the forward fine segment
/// (the segments must share the junction node time).
RadiusPath radius_path_composite(const NoisePath& burn, const NoisePath& forward,
                                 const CovarianceSpec& Q, const NSEParams& p, double eps);

/// Default pullback horizon 20 / (nu lambda1).
double default_t_burn(const NSEParams& p);

}  // namespace detfun

#endif
