// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/ou.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace detfun {

void OUParams::validate() const {
  if (!(nu > 0)) throw ConfigError("OUParams: nu must be > 0");
  if (!(kappa >= 0)) throw ConfigError("OUParams: kappa must be >= 0");
}

SpectralField sample_wiener_increment(const CovarianceSpec& Q, double dt, DrawKey key) {
  if (!(dt > 0)) throw ConfigError("sample_wiener_increment: dt must be > 0");
  SpectralField w = SpectralField::zero(Q.grid_ptr());
  const SpectralGrid& g = Q.grid();
  for (int m = 0; m < g.canonical_count(); ++m) {
    const double q = Q.q(m);
    if (q == 0) continue;
    const Mode& k = g.mode(m);
    const auto [g1, g2] = rng::normal_pair(
        key.seed, rng::mode_stream(rng::Channel::wiener, k.k1, k.k2), key.counter);
    const double s = 0.5 * std::sqrt(q * dt);  // per-part std, pair mass q dt
    w.set_amplitude(m, Complex(s * g1, s * g2));
  }
  return w;
}

namespace {

// Variance bracket of the conditional remainder, (1/x) form:
// em1(2x)/2 - em1(x)^2/x with em1(x) = 1 - exp(-x); series below x = 0.05
// to dodge cancellation.
double conv_bracket(double x) {
  if (x < 0.05) {
    const double x3 = x * x * x;
    return x3 / 12.0 - x3 * x / 12.0 + 17.0 * x3 * x * x / 360.0;
  }
  const double em1 = -std::expm1(-x);
  const double em2 = -std::expm1(-2.0 * x);
  return 0.5 * em2 - em1 * em1 / x;
}

}  // namespace

SpectralField ou_step(const SpectralField& z, double dt, const OUParams& p,
                      const CovarianceSpec& Q, DrawKey key) {
  if (!(dt > 0)) throw ConfigError("ou_step: dt must be > 0");
  p.validate();
  if (z.grid() != Q.grid()) throw ConfigError("ou_step: state/covariance grid mismatch");
  SpectralField out = SpectralField::zero(z.grid_ptr());
  const SpectralGrid& g = z.grid();
  for (int m = 0; m < g.canonical_count(); ++m) {
    const double lambda = p.rate(g.a(m));
    const double decay = std::exp(-lambda * dt);
    Complex psi = decay * z.amplitude(m);
    const double q = Q.q(m);
    if (q > 0) {
      // exact transition noise: per-part variance q (1 - e^{-2 lambda dt}) / (8 lambda)
      const double var = q * (-std::expm1(-2.0 * lambda * dt)) / (8.0 * lambda);
      const Mode& k = g.mode(m);
      const auto [g1, g2] = rng::normal_pair(
          key.seed, rng::mode_stream(rng::Channel::ou_extra, k.k1, k.k2), key.counter);
      const double s = std::sqrt(var);
      psi += Complex(s * g1, s * g2);
    }
    out.set_amplitude(m, psi);
  }
  return out;
}

SpectralField ou_stationary_sample(const OUParams& p, const CovarianceSpec& Q, DrawKey key) {
  p.validate();
  SpectralField z = SpectralField::zero(Q.grid_ptr());
  const SpectralGrid& g = Q.grid();
  for (int m = 0; m < g.canonical_count(); ++m) {
    const double q = Q.q(m);
    if (q == 0) continue;
    const double lambda = p.rate(g.a(m));
    const double s = std::sqrt(q / (8.0 * lambda));  // per-part std
    const Mode& k = g.mode(m);
    const auto [g1, g2] = rng::normal_pair(
        key.seed, rng::mode_stream(rng::Channel::stationary, k.k1, k.k2), key.counter);
    z.set_amplitude(m, Complex(s * g1, s * g2));
  }
  return z;
}

double ou_stationary_pair_variance(const OUParams& p, const CovarianceSpec& Q, int m) {
  return Q.q(m) / (4.0 * (p.kappa + 1.0) * p.nu * Q.grid().a(m));
}

double stationary_moment(double alpha, const OUParams& p, const CovarianceSpec& Q) {
  if (!(alpha >= 0.0 && alpha <= 1.5))
    throw ConfigError("stationary_moment: alpha must lie in [0, 3/2]");
  p.validate();
  return Q.trace_a_pow(2.0 * alpha - 1.0) / (4.0 * (p.kappa + 1.0) * p.nu);
}

double stationary_v_moment(const OUParams& p, const CovarianceSpec& Q) {
  return 2.0 * stationary_moment(0.5, p, Q);
}

NoisePath NoisePath::generate(const CovarianceSpec& Q, const OUParams& p, double t0,
                              double t_end, double dt, std::uint64_t seed,
                              std::uint64_t counter_base) {
  return generate_from(ou_stationary_sample(p, Q, {seed, counter_base}), Q, p, t0, t_end,
                       dt, seed, counter_base);
}

NoisePath NoisePath::generate_from(SpectralField z0, const CovarianceSpec& Q,
                                   const OUParams& p, double t0, double t_end, double dt,
                                   std::uint64_t seed, std::uint64_t counter_base) {
  if (!(dt > 0)) throw ConfigError("NoisePath: dt must be > 0");
  if (!(t_end > t0)) throw ConfigError("NoisePath: empty time range");
  p.validate();
  if (z0.grid() != Q.grid()) throw ConfigError("NoisePath: state/covariance grid mismatch");
  const double raw = (t_end - t0) / dt;
  const int n_steps = static_cast<int>(std::lround(raw));
  if (n_steps < 1 || std::abs(raw - n_steps) > 1e-9)
    throw ConfigError("NoisePath: dt does not divide the time range");

  NoisePath path;
  path.seed_ = seed;
  path.t0_ = t0;
  path.dt_ = dt;
  path.z_.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.increments_.reserve(static_cast<std::size_t>(n_steps));
  path.z_.push_back(std::move(z0));

  const SpectralGrid& g = Q.grid();
  for (int i = 0; i < n_steps; ++i) {
    const std::uint64_t ctr = counter_base + static_cast<std::uint64_t>(i);
    SpectralField dw = SpectralField::zero(Q.grid_ptr());
    SpectralField z_next = SpectralField::zero(Q.grid_ptr());
    const SpectralField& z_prev = path.z_.back();
    for (int m = 0; m < g.canonical_count(); ++m) {
      const double lambda = p.rate(g.a(m));
      const double x = lambda * dt;
      const double decay = std::exp(-x);
      Complex psi = decay * z_prev.amplitude(m);
      const double q = Q.q(m);
      if (q > 0) {
        const Mode& k = g.mode(m);
        const auto [w1, w2] = rng::normal_pair(
            seed, rng::mode_stream(rng::Channel::wiener, k.k1, k.k2), ctr);
        const auto [e1g, e2g] = rng::normal_pair(
            seed, rng::mode_stream(rng::Channel::ou_extra, k.k1, k.k2), ctr);
        const double sw = 0.5 * std::sqrt(q * dt);
        const Complex dpsi(sw * w1, sw * w2);
        // conditional law of the stochastic convolution given the increment
        const double slope = -std::expm1(-x) / x;
        const double resid_var = q / (4.0 * lambda) * conv_bracket(x);
        const double sr = std::sqrt(std::max(resid_var, 0.0));
        dw.set_amplitude(m, dpsi);
        psi += slope * dpsi + Complex(sr * e1g, sr * e2g);
      }
      z_next.set_amplitude(m, psi);
    }
    path.increments_.push_back(std::move(dw));
    path.z_.push_back(std::move(z_next));
  }
  return path;
}

int NoisePath::index_at(double t) const {
  const double raw = (t - t0_) / dt_;
  const int i = static_cast<int>(std::lround(raw));
  if (i < 0 || i > steps() || std::abs(raw - i) > 1e-9)
    throw ConfigError("NoisePath::index_at: time off the stored grid");
  return i;
}

NoisePath NoisePath::shifted(double tau) const {
  const int i0 = index_at(tau);
  NoisePath out;
  out.seed_ = seed_;
  out.t0_ = 0.0;
  out.dt_ = dt_;
  out.z_.assign(z_.begin() + i0, z_.end());
  out.increments_.assign(increments_.begin() + i0, increments_.end());
  return out;
}

NoisePath NoisePath::coarsened(int factor) const {
  if (factor < 1 || steps() % factor != 0)
    throw ConfigError("NoisePath::coarsened: factor must divide the step count");
  NoisePath out;
  out.seed_ = seed_;
  out.t0_ = t0_;
  out.dt_ = dt_ * factor;
  const int n = steps() / factor;
  out.z_.reserve(static_cast<std::size_t>(n) + 1);
  out.increments_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i <= n; ++i) out.z_.push_back(z_[static_cast<std::size_t>(i) * factor]);
  for (int i = 0; i < n; ++i) {
    SpectralField acc = increments_[static_cast<std::size_t>(i) * factor];
    for (int j = 1; j < factor; ++j)
      acc += increments_[static_cast<std::size_t>(i) * factor + j];
    out.increments_.push_back(std::move(acc));
  }
  return out;
}

}  // namespace detfun
