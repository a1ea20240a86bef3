// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/dynamics.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace detfun {

NSEParams::NSEParams(double nu_, double kappa_, SpectralField forcing_)
    : nu(nu_), kappa(kappa_), forcing(std::move(forcing_)) {
  if (!(nu > 0)) throw ConfigError("NSEParams: nu must be > 0");
  if (!(kappa >= 0)) throw ConfigError("NSEParams: kappa must be >= 0");
}

void Trajectory::reserve(int n_nodes) {
  times_.reserve(n_nodes);
  norms_.reserve(n_nodes);
}

void Trajectory::push_node(double t, const NormBundle& n) {
  times_.push_back(t);
  norms_.push_back(n);
}

void Trajectory::push_snapshot(int node_index, SpectralField u) {
  snapshots_.emplace_back(node_index, std::move(u));
}

const SpectralField& Trajectory::snapshot_at_node(int node_index) const {
  for (const auto& [idx, f] : snapshots_)
    if (idx == node_index) return f;
  throw ConfigError("Trajectory: no snapshot stored at the requested node");
}

const SpectralField& Trajectory::final_snapshot() const {
  if (snapshots_.empty()) throw ConfigError("Trajectory: no snapshots stored");
  return snapshots_.back().second;
}

SpectralField transformed_rhs(const SpectralField& u, const SpectralField& z,
                              const NSEParams& p) {
  require_same_grid(u, z, "transformed_rhs");
  require_same_grid(u, p.forcing, "transformed_rhs");
  // the four convective terms assemble by bilinearity into B(u+z, u+z)
  SpectralField rhs = nonlinear_term(u + z, u + z);
  rhs *= -1.0;
  rhs.axpy(-2.0 * p.nu, apply_stokes(u, 1.0));
  rhs.axpy(2.0 * p.nu * p.kappa, apply_stokes(z, 1.0));
  rhs += p.forcing;
  return rhs;
}

double lipschitz_l(const SpectralField& u1, const SpectralField& z, double nu) {
  if (!(nu > 0)) throw ConfigError("lipschitz_l: nu must be > 0");
  const double uv = std::sqrt(2.0) * a_power_norm(u1, 1.0);
  const double zv = std::sqrt(2.0) * a_power_norm(z, 1.0);
  return (2.0 / nu) * (uv * uv + zv * zv);
}

namespace {

std::vector<double> viscous_decay(const SpectralGrid& g, double nu, double dt) {
  std::vector<double> d(static_cast<std::size_t>(g.canonical_count()));
  for (int m = 0; m < g.canonical_count(); ++m)
    d[m] = std::exp(-2.0 * nu * g.a(m) * dt);
  return d;
}

void scale_modes(SpectralField& u, const std::vector<double>& factor) {
  for (int m = 0; m < u.grid().canonical_count(); ++m)
    u.set_amplitude(m, u.amplitude(m) * factor[m]);
}

bool finite_field(const SpectralField& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Complex c = u.data()[i];
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace

TransformedStepper::TransformedStepper(const NSEParams& p, double dt)
    : p_(p), dt_(dt), decay_(viscous_decay(p.grid(), p.nu, dt)) {
  if (!(dt > 0)) throw ConfigError("TransformedStepper: dt must be > 0");
}

SpectralField TransformedStepper::step(const SpectralField& u, const SpectralField& z) {
  SpectralField g = nonlinear_term(u + z, u + z, ws_);
  g *= -1.0;
  g.axpy(2.0 * p_.nu * p_.kappa, apply_stokes(z, 1.0));
  g += p_.forcing;
  SpectralField next = u;
  next.axpy(dt_, g);
  scale_modes(next, decay_);
  return next;
}

double TransformedStepper::cfl_number(const SpectralField& u, const SpectralField& z) const {
  return dt_ * sup_norm_bound(u + z) * p_.grid().n_max();
}

DirectStepper::DirectStepper(const NSEParams& p, double dt)
    : p_(p), dt_(dt), decay_(viscous_decay(p.grid(), p.nu, dt)) {
  if (!(dt > 0)) throw ConfigError("DirectStepper: dt must be > 0");
}

SpectralField DirectStepper::step(const SpectralField& v, const SpectralField& dw) {
  SpectralField g = nonlinear_term(v, v, ws_);
  g *= -1.0;
  g += p_.forcing;
  SpectralField next = v;
  next.axpy(dt_, g);
  scale_modes(next, decay_);
  next += dw;
  return next;
}

double DirectStepper::cfl_number(const SpectralField& v) const {
  return dt_ * sup_norm_bound(v) * p_.grid().n_max();
}

namespace {

template <typename StepFn, typename CflFn>
Trajectory integrate_loop(const SpectralField& x0, const NoisePath& path,
                          const NSEParams& p, double t_end, double dt, double t_start,
                          const IntegrateOptions& opts, const char* scheme, StepFn step,
                          CflFn cfl) {
  if (x0.grid() != p.grid()) throw ConfigError("integrate: state/params grid mismatch");
  if (x0.grid() != path.z(0).grid())
    throw ConfigError("integrate: state/path grid mismatch");
  if (std::abs(dt - path.dt()) > 1e-12 * std::max(1.0, path.dt()))
    throw ConfigError("integrate: dt must equal the noise path spacing");
  const int i0 = path.index_at(t_start);
  const int i1 = path.index_at(t_end);
  if (i1 <= i0) throw ConfigError("integrate: empty time range");

  Trajectory traj;
  traj.reserve(i1 - i0 + 1);
  traj.provenance().seed = path.seed();
  traj.provenance().dt = dt;
  traj.provenance().scheme = scheme;

  SpectralField u = x0;
  int node = 0;
  traj.push_node(t_start, norms(u));
  traj.push_snapshot(0, u);
  if (opts.observer) opts.observer(0, t_start, u);

  for (int i = i0; i < i1; ++i) {
    const double c = cfl(u, i);
    if (c > opts.cfl_limit && !traj.flags().cfl_flagged) {
      traj.flags().cfl_flagged = true;
      traj.flags().first_cfl_time = path.time(i);
    }
    SpectralField next = step(u, i);
    const double t_next = path.time(i + 1);
    if (!finite_field(next)) {
      traj.flags().aborted = true;
      traj.flags().last_valid_time = path.time(i);
      break;
    }
    u = std::move(next);
    ++node;
    traj.push_node(t_next, norms(u));
    const bool last = (i + 1 == i1);
    if (last || (opts.snapshot_stride > 0 && node % opts.snapshot_stride == 0))
      traj.push_snapshot(node, u);
    if (opts.observer) opts.observer(node, t_next, u);
  }
  if (!traj.flags().aborted) traj.flags().last_valid_time = traj.time(traj.nodes() - 1);
  return traj;
}

}  // namespace

Trajectory integrate_transformed(const SpectralField& x0, const NoisePath& path,
                                 const NSEParams& p, double t_end, double dt,
                                 double t_start, const IntegrateOptions& opts) {
  TransformedStepper stepper(p, dt);
  return integrate_loop(
      x0, path, p, t_end, dt, t_start, opts, "transformed-lawson-euler",
      [&](const SpectralField& u, int i) { return stepper.step(u, path.z(i)); },
      [&](const SpectralField& u, int i) { return stepper.cfl_number(u, path.z(i)); });
}

Trajectory integrate_sns_direct(const SpectralField& v0, const NoisePath& path,
                                const NSEParams& p, double t_end, double dt,
                                double t_start, const IntegrateOptions& opts) {
  DirectStepper stepper(p, dt);
  return integrate_loop(
      v0, path, p, t_end, dt, t_start, opts, "direct-euler-maruyama",
      [&](const SpectralField& v, int i) { return stepper.step(v, path.increment(i)); },
      [&](const SpectralField& v, int) { return stepper.cfl_number(v); });
}

Trajectory conjugate(const Trajectory& traj_u, const NoisePath& path) {
  Trajectory out;
  out.provenance() = traj_u.provenance();
  out.provenance().scheme = traj_u.provenance().scheme + "+conjugation";
  out.flags() = traj_u.flags();
  for (int s = 0; s < traj_u.snapshot_count(); ++s) {
    const int node = traj_u.snapshot_node(s);
    const double t = traj_u.time(node);
    const int pi = path.index_at(t);
    SpectralField v = traj_u.snapshot(s);
    v += path.z(pi);
    out.push_node(t, norms(v));
    out.push_snapshot(out.nodes() - 1, std::move(v));
  }
  return out;
}

double radius_drive_m(const SpectralField& z, const NSEParams& p) {
  const double zv2 = 2.0 * a_power_norm(z, 1.0) * a_power_norm(z, 1.0);
  const NormBundle nf = norms(p.forcing);
  const double l1 = p.lambda1();
  return (4.0 / p.nu) * ((2.0 / l1) * zv2 * zv2 + p.kappa * p.kappa * p.nu * p.nu * zv2 +
                         nf.v_dual * nf.v_dual);
}

double RadiusPath::r_sq_at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9) return r_sq[i];
  throw ConfigError("RadiusPath: time off the stored grid");
}

namespace {

// Exact step of d rho/dt = alpha rho + b with frozen coefficients.
double affine_step(double rho, double alpha, double b, double dt) {
  const double e = std::exp(alpha * dt);
  const double phi = (std::abs(alpha) > 1e-14)
                         ? std::expm1(alpha * dt) / alpha
                         : dt * (1.0 + 0.5 * alpha * dt);
  return e * rho + b * phi;
}

void radius_extend(RadiusPath& rp, double& rho, const NoisePath& path,
                   const NSEParams& p, double eps, bool include_first) {
  const double l1 = p.lambda1();
  const double f_vdual = norms(p.forcing).v_dual;
  const double f2 = f_vdual * f_vdual;
  auto zv2_at = [&](int i) {
    const double zv = std::sqrt(2.0) * a_power_norm(path.z(i), 1.0);
    return zv * zv;
  };
  auto m_at = [&](double zv2) {
    return (4.0 / p.nu) *
           ((2.0 / l1) * zv2 * zv2 + p.kappa * p.kappa * p.nu * p.nu * zv2 + f2);
  };
  double zv2 = zv2_at(0);
  if (include_first) {
    rp.times.push_back(path.time(0));
    rp.r_sq.push_back((1.0 + eps) * rho);
    rp.m_vals.push_back(m_at(zv2));
  }
  for (int i = 0; i < path.steps(); ++i) {
    const double alpha = -p.nu * l1 + (8.0 / p.nu) * zv2;
    rho = affine_step(rho, alpha, m_at(zv2), path.dt());
    zv2 = zv2_at(i + 1);
    rp.times.push_back(path.time(i + 1));
    rp.r_sq.push_back((1.0 + eps) * rho);
    rp.m_vals.push_back(m_at(zv2));
  }
}

bool radius_admissible(const CovarianceSpec& Q, const NSEParams& p) {
  return p.lambda1() >
         4.0 * Q.trace() / ((p.kappa + 1.0) * p.nu * p.nu * p.nu);
}

}  // namespace

RadiusPath radius_path(const NoisePath& path, const CovarianceSpec& Q,
                       const NSEParams& p, double eps, double t_burn) {
  if (!(eps > 0)) throw ConfigError("radius_path: eps must be > 0");
  if (!(t_burn > 0)) throw ConfigError("radius_path: t_burn must be > 0");
  RadiusPath rp;
  rp.eps_margin = eps;
  rp.t_burn = t_burn;
  rp.admissibility_ok = radius_admissible(Q, p);
  double rho = 0.0;
  radius_extend(rp, rho, path, p, eps, true);
  return rp;
}

RadiusPath radius_path_composite(const NoisePath& burn, const NoisePath& forward,
                                 const CovarianceSpec& Q, const NSEParams& p,
                                 double eps) {
  if (std::abs(burn.t_end() - forward.t0()) > 1e-9)
    throw ConfigError("radius_path_composite: segments do not join");
  RadiusPath rp;
  rp.eps_margin = eps;
  rp.t_burn = forward.t0() - burn.t0();
  rp.admissibility_ok = radius_admissible(Q, p);
  double rho = 0.0;
  radius_extend(rp, rho, burn, p, eps, true);
  radius_extend(rp, rho, forward, p, eps, false);
  return rp;
}

double default_t_burn(const NSEParams& p) { return 20.0 / (p.nu * p.lambda1()); }

}  // namespace detfun
