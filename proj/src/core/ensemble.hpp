// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_ENSEMBLE_HPP
#define DETFUN_CORE_ENSEMBLE_HPP

#include <cstdint>

#include "core/covariance.hpp"
#include "core/dynamics.hpp"
#include "core/ou.hpp"
#include "core/rng.hpp"

namespace detfun {

// Counter ranges keeping burn-in draws disjoint from forward draws under
// one seed.
inline constexpr std::uint64_t kBurnCounterBase = std::uint64_t{1} << 40;

// One noise realization: coarse past segment for the pullback radius,
// fine forward segment for trajectories, joined at t = 0 through the OU
// state (past and future increments are independent, so the split is a
// faithful construction of one omega).
struct Realization {
  NoisePath burn;
  NoisePath forward;
  RadiusPath radius;
  double r0 = 0;  // R(0), the absorbing radius at time zero
};

struct RealizationSpec {
  double t_end = 1.0;
  double dt = 1e-3;
  double t_burn = 0;    // 0: default 20/(nu lambda1)
  double burn_dt = 0.01;
  double eps_margin = 0.1;
};

inline Realization make_realization(const NSEParams& p, const CovarianceSpec& Q,
                                    const RealizationSpec& spec, std::uint64_t seed) {
  Realization r;
  const double t_burn = spec.t_burn > 0 ? spec.t_burn : default_t_burn(p);
  r.burn = NoisePath::generate(Q, p.ou(), -t_burn, 0.0, spec.burn_dt, seed,
                               kBurnCounterBase);
  r.forward = NoisePath::generate_from(r.burn.z(r.burn.steps()), Q, p.ou(), 0.0,
                                       spec.t_end, spec.dt, seed, 0);
  r.radius = radius_path_composite(r.burn, r.forward, Q, p, spec.eps_margin);
  r.r0 = std::sqrt(r.radius.r_sq_at(0.0));
  return r;
}

/// Random divergence-free field with prescribed H-norm (uniform random
/// direction via per-mode Gaussians).
inline SpectralField sample_on_sphere(GridPtr grid, double radius_h, std::uint64_t seed,
                                      std::uint64_t counter) {
  SpectralField u = SpectralField::zero(grid);
  const SpectralGrid& g = *grid;
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    const auto [g1, g2] = rng::normal_pair(
        seed, rng::mode_stream(rng::Channel::init_cond, k.k1, k.k2), counter);
    u.set_amplitude(m, Complex(g1, g2));
  }
  const double h = norm_h(u);
  if (h > 0 && radius_h > 0)
    u *= radius_h / h;
  else
    u *= 0.0;
  return u;
}

}  // namespace detfun

#endif
