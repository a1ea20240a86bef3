// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_OU_HPP
#define DETFUN_CORE_OU_HPP

#include <cstdint>
#include <vector>

#include "core/covariance.hpp"
#include "core/field.hpp"

namespace detfun {

// Control parameters of the Ornstein-Uhlenbeck regularization
// dz + 2(kappa+1) nu A z dt = dw. kappa is the regularization control knob
// (named kappa to keep k free for wavevectors).
struct OUParams {
  double kappa = 0.0;
  double nu = 1.0;
  void validate() const;
  /// Per-mode decay rate 2 (kappa+1) nu a_k.
  double rate(double a) const { return 2.0 * (kappa + 1.0) * nu * a; }
};

/// Addressing of a deterministic draw: all sampling below is a pure
/// function of (seed, counter, mode).
struct DrawKey {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;
};

/// Gaussian increment of the Q-Wiener process over dt; divergence-free
/// by construction. Rejects dt <= 0.
SpectralField sample_wiener_increment(const CovarianceSpec& Q, double dt, DrawKey key);

/// Exact OU transition over dt: z' = e^{-rate dt} z + xi with xi of the
/// exact stationary-consistent variance (no discretization error).
SpectralField ou_step(const SpectralField& z, double dt, const OUParams& p,
                      const CovarianceSpec& Q, DrawKey key);

/// Draw from the stationary law (per-pair variance q_k / (4(kappa+1) nu a_k)).
SpectralField ou_stationary_sample(const OUParams& p, const CovarianceSpec& Q, DrawKey key);

/// Stationary variance of the mode pair m.
double ou_stationary_pair_variance(const OUParams& p, const CovarianceSpec& Q, int m);

/// E ||A^alpha z||_H^2 = tr_H(Q A^{2 alpha - 1}) / (4 (kappa+1) nu),
/// valid for alpha in [0, 3/2].
double stationary_moment(double alpha, const OUParams& p, const CovarianceSpec& Q);

/// E ||z||_V^2 = 2 E ||A^{1/2} z||_H^2 (closed form).
double stationary_v_moment(const OUParams& p, const CovarianceSpec& Q);

// Stored realization of the driving noise on a uniform grid: Wiener
// increments per step and the OU state at every node. The z path
// satisfies the exact per-mode OU recursion given the stored increments
// (the stochastic convolution is drawn jointly with each increment), so
// the transformed and the direct integrator consume the same omega.
// Regeneration from (seed, range, dt) is bit-exact.
class NoisePath {
 public:
  NoisePath() = default;  // empty path; fill via generate / generate_from

  static NoisePath generate(const CovarianceSpec& Q, const OUParams& p, double t0,
                            double t_end, double dt, std::uint64_t seed,
                            std::uint64_t counter_base = 0);
  /// Same, but continuing from a given state at t0 instead of a fresh
  /// stationary draw (used to join burn-in and forward segments).
  static NoisePath generate_from(SpectralField z0, const CovarianceSpec& Q,
                                 const OUParams& p, double t0, double t_end, double dt,
                                 std::uint64_t seed, std::uint64_t counter_base = 0);

  int steps() const { return static_cast<int>(increments_.size()); }
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double t_end() const { return time(steps()); }
  double time(int i) const { return t0_ + dt_ * i; }
  std::uint64_t seed() const { return seed_; }

  const SpectralField& z(int i) const { return z_[static_cast<std::size_t>(i)]; }
  const SpectralField& increment(int i) const {
    return increments_[static_cast<std::size_t>(i)];
  }

  /// Node index of time t; rejects t off the grid.
  int index_at(double t) const;

  /// theta_tau shift: re-anchor the stored path at node time tau.
  NoisePath shifted(double tau) const;
  /// The same omega at spacing dt * factor: increments summed, z subsampled.
  NoisePath coarsened(int factor) const;

 private:
  std::uint64_t seed_ = 0;
  double t0_ = 0, dt_ = 0;
  std::vector<SpectralField> increments_;
  std::vector<SpectralField> z_;
};

}  // namespace detfun

#endif
