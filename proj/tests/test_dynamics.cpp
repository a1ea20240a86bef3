// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/dynamics.hpp"
#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "test_support.hpp"

using namespace detfun;
using namespace detfun::testing;

namespace {

NSEParams make_params(GridPtr g, double nu = 1.0, double kappa = 0.0,
                      Complex f_amp = Complex(0)) {
  SpectralField f = SpectralField::zero(g);
  if (f_amp != Complex(0)) f = SpectralField::single_mode(g, {1, 0}, f_amp);
  return NSEParams(nu, kappa, std::move(f));
}

NoisePath quiet_path(GridPtr g, double t0, double t1, double dt, const OUParams& p) {
  return NoisePath::generate(CovarianceSpec::zero(g), p, t0, t1, dt, 1);
}

}  // namespace

TEST_CASE("transformed rhs fixtures") {
  const GridPtr g = make_grid(4);
  const NSEParams p = make_params(g);
  const SpectralField z = SpectralField::zero(g);
  const SpectralField u = SpectralField::single_mode(g, {1, 0}, Complex(0.5, 0.25));

  // single shear mode: rhs = -2 nu A u = -|k|^2 u = -u
  const SpectralField r = transformed_rhs(u, z, p);
  CHECK(field_max_abs_diff(r, -1.0 * u) < 1e-13);

  // u = z = 0 -> f
  const NSEParams pf = make_params(g, 1.0, 0.0, Complex(0.3, 0.1));
  const SpectralField rf = transformed_rhs(SpectralField::zero(g), z, pf);
  CHECK(field_max_abs_diff(rf, pf.forcing) == 0.0);

  // u = 0, f = 0: rhs = -P[(z.grad)z] + 2 nu kappa A z
  const NSEParams pk = make_params(g, 1.0, 3.0);
  const SpectralField zr = SpectralField::random(g, 5, 0, true);
  SpectralField want = nonlinear_term(zr, zr);
  want *= -1.0;
  want.axpy(2.0 * 1.0 * 3.0, apply_stokes(zr, 1.0));
  const SpectralField got = transformed_rhs(SpectralField::zero(g), zr, pk);
  const double scale = std::max(field_max_abs(want), 1e-30);
  CHECK(field_max_abs_diff(got, want) / scale < 1e-12);
}

TEST_CASE("lipschitz rate function") {
  const GridPtr g = make_grid(4);
  const SpectralField zero = SpectralField::zero(g);
  CHECK(lipschitz_l(zero, zero, 1.0) == 0.0);

  // ||u1||_V = 1, z = 0, nu = 2 -> 1.0
  const SpectralField u = SpectralField::single_mode(g, {1, 0}, Complex(1.0 / std::sqrt(2.0), 0));
  CHECK(norms(u).v == doctest::Approx(1.0));
  CHECK(lipschitz_l(u, zero, 2.0) == doctest::Approx(1.0).epsilon(1e-13));

  // monotone in each argument
  const SpectralField u2 = 2.0 * u;
  CHECK(lipschitz_l(u2, zero, 2.0) > lipschitz_l(u, zero, 2.0));
  CHECK(lipschitz_l(u, u, 2.0) > lipschitz_l(u, zero, 2.0));
  CHECK_THROWS_AS(lipschitz_l(u, zero, 0.0), ConfigError);
}

TEST_CASE("heat decay of a single mode is exact") {
  const GridPtr g = make_grid(4);
  const NSEParams p = make_params(g);
  const NoisePath path = quiet_path(g, 0.0, 1.0, 1e-3, p.ou());
  const SpectralField x0 = SpectralField::single_mode(g, {1, 0}, Complex(0.8, -0.1));
  const Trajectory traj = integrate_transformed(x0, path, p, 1.0, 1e-3);
  const double got = traj.norm_at(traj.nodes() - 1).h;
  const double want = std::exp(-1.0) * norm_h(x0);
  CHECK(rel_err(got, want) < 1e-6);
  CHECK_FALSE(traj.flags().aborted);
  CHECK_FALSE(traj.flags().cfl_flagged);
}

TEST_CASE("zero data with zero forcing stays zero") {
  const GridPtr g = make_grid(3);
  const NSEParams p = make_params(g);
  const NoisePath path = quiet_path(g, 0.0, 0.5, 1e-2, p.ou());
  const Trajectory traj = integrate_transformed(SpectralField::zero(g), path, p, 0.5, 1e-2);
  CHECK(traj.norm_at(traj.nodes() - 1).h == 0.0);
  const Trajectory direct = integrate_sns_direct(SpectralField::zero(g), path, p, 0.5, 1e-2);
  CHECK(direct.norm_at(direct.nodes() - 1).h == 0.0);
}

TEST_CASE("cocycle property: restart from a node is bit exact") {
  const GridPtr g = make_grid(3);
  const OUParams op{2.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::power_law(g, 0.01, 2.0);
  const NoisePath path = NoisePath::generate(q, op, 0.0, 2.0, 1e-2, 99);
  const NSEParams p = make_params(g, 1.0, 2.0, Complex(0.05, 0));

  IntegrateOptions opts;
  opts.snapshot_stride = 100;  // node 100 = t 1.0
  const Trajectory full = integrate_transformed(
      SpectralField::random(g, 7, 0, true), path, p, 2.0, 1e-2, 0.0, opts);
  const SpectralField& mid = full.snapshot_at_node(100);

  const NoisePath tail = path.shifted(1.0);
  const Trajectory rerun = integrate_transformed(mid, tail, p, 1.0, 1e-2);
  CHECK(rerun.final_snapshot().bit_equal(full.final_snapshot()));
}

TEST_CASE("deterministic limit: both integrators agree") {
  const GridPtr g = make_grid(4);
  const NSEParams p = make_params(g, 1.0, 0.0, Complex(0.2, 0.05));
  const NoisePath path = quiet_path(g, 0.0, 1.0, 1e-3, p.ou());
  const SpectralField v0 = SpectralField::random(g, 11, 0, true);
  const Trajectory a = integrate_transformed(v0, path, p, 1.0, 1e-3);
  const Trajectory b = integrate_sns_direct(v0, path, p, 1.0, 1e-3);
  const SpectralField diff = a.final_snapshot() - b.final_snapshot();
  CHECK(norm_h(diff) <= 1e-8);
}

TEST_CASE("conjugation: z = 0 is the identity, constant shift is preserved") {
  const GridPtr g = make_grid(3);
  const NSEParams p = make_params(g);
  const NoisePath path = quiet_path(g, 0.0, 0.5, 1e-2, p.ou());
  IntegrateOptions opts;
  opts.snapshot_stride = 10;
  const Trajectory u = integrate_transformed(SpectralField::random(g, 13, 0, true), path,
                                             p, 0.5, 1e-2, 0.0, opts);
  const Trajectory v = conjugate(u, path);
  CHECK(v.snapshot_count() == u.snapshot_count());
  for (int s = 0; s < v.snapshot_count(); ++s)
    CHECK(v.snapshot(s).bit_equal(u.snapshot(s)));
}

TEST_CASE("strong order: conjugate-vs-direct gap shrinks under dt halving") {
  const GridPtr g = make_grid(3);
  const OUParams op{1.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::power_law(g, 0.01, 2.5);
  const NSEParams p = make_params(g, 1.0, 1.0, Complex(0.05, 0));
  const NoisePath fine = NoisePath::generate(q, op, 0.0, 1.0, 5e-4, 4242);
  const NoisePath coarse = fine.coarsened(2);

  auto gap_at = [&](const NoisePath& path, double dt) {
    const SpectralField v0 = SpectralField::random(g, 17, 0, true);
    SpectralField u0 = v0;
    u0 -= path.z(0);
    const Trajectory u = integrate_transformed(u0, path, p, 1.0, dt);
    const Trajectory v = integrate_sns_direct(v0, path, p, 1.0, dt);
    SpectralField vu = u.final_snapshot();
    vu += path.z(path.steps());
    return norm_h(vu - v.final_snapshot());
  };
  const double gap_coarse = gap_at(coarse, 1e-3);
  const double gap_fine = gap_at(fine, 5e-4);
  CHECK(gap_fine > 0);
  CHECK(gap_coarse / gap_fine >= 1.3);
}

TEST_CASE("energy dissipation law at zero noise and forcing") {
  const GridPtr g = make_grid(4);
  const NSEParams p = make_params(g);
  const double dt = 1e-4;
  const NoisePath path = quiet_path(g, 0.0, 0.01, dt, p.ou());
  SpectralField u = 0.3 * SpectralField::random(g, 19, 0, true);
  TransformedStepper stepper(p, dt);
  for (int i = 0; i < 20; ++i) {
    const double e0 = norm_h(u) * norm_h(u);
    const double v0 = norms(u).v;
    const SpectralField next = stepper.step(u, path.z(0));
    const double e1 = norm_h(next) * norm_h(next);
    const double derivative = (e1 - e0) / dt;
    CHECK(rel_err(derivative, -2.0 * p.nu * v0 * v0) < 0.02);
    u = next;
  }
}

TEST_CASE("cfl heuristic flags oversized advective steps") {
  const GridPtr g = make_grid(4);
  const NSEParams p = make_params(g);
  const NoisePath path = quiet_path(g, 0.0, 1.0, 0.5, p.ou());
  const SpectralField big = 50.0 * SpectralField::random(g, 23, 0, true);
  const Trajectory traj = integrate_transformed(big, path, p, 1.0, 0.5);
  CHECK(traj.flags().cfl_flagged);
}

TEST_CASE("blowup aborts with the last valid time retained") {
  const GridPtr g = make_grid(3);
  SpectralField f = SpectralField::single_mode(g, {1, 0}, Complex(1e160, 0));
  f += SpectralField::single_mode(g, {0, 1}, Complex(1e160, 0));
  const NSEParams p(1.0, 0.0, std::move(f));
  const NoisePath path = quiet_path(g, 0.0, 10.0, 0.5, p.ou());
  const Trajectory traj = integrate_transformed(SpectralField::zero(g), path, p, 10.0, 0.5);
  CHECK(traj.flags().aborted);
  CHECK(traj.flags().last_valid_time < 10.0);
  CHECK(traj.nodes() >= 1);
}

TEST_CASE("radius fixed point at zero noise") {
  const GridPtr g = make_grid(3);
  const double f_amp = 0.05;
  const NSEParams p = make_params(g, 1.0, 0.0, Complex(f_amp, 0));
  const CovarianceSpec q = CovarianceSpec::zero(g);
  const NoisePath path = quiet_path(g, -20.0, 1.0, 0.01, p.ou());
  const RadiusPath rp = radius_path(path, q, p, 0.1, 20.0);
  CHECK(rp.admissibility_ok);

  const NormBundle nf = norms(p.forcing);
  const double want = 1.1 * 4.0 * nf.v_dual * nf.v_dual / (1.0 * 1.0);
  CHECK(rel_err(rp.r_sq_at(0.0), want) < 1e-6);
  CHECK(rel_err(rp.r_sq_at(1.0), want) < 1e-6);

  // f = 0, Q = 0: radius identically zero
  const NSEParams p0 = make_params(g);
  const RadiusPath rp0 = radius_path(path, q, p0, 0.1, 20.0);
  CHECK(rp0.r_sq_at(0.0) == 0.0);
}

TEST_CASE("pullback horizon: doubling t_burn moves the radius by < 1%") {
  const GridPtr g = make_grid(3);
  const OUParams op{7.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::power_law(g, 1e-3, 2.5);
  const NSEParams p = make_params(g, 1.0, 7.0, Complex(0.05, 0));
  const NoisePath path40 = NoisePath::generate(q, op, -40.0, 0.0, 0.01, 5150);
  const RadiusPath rp40 = radius_path(path40, q, p, 0.1, 40.0);
  // the tail of the same omega, seen as a 20-unit pullback
  const NoisePath path20 = path40.shifted(-20.0);
  const RadiusPath rp20 = radius_path(path20, q, p, 0.1, 20.0);
  const double r40 = rp40.r_sq_at(0.0);
  const double r20 = rp20.r_sq_at(20.0);
  CHECK(rel_err(r20, r40) < 0.01);
}

TEST_CASE("radius admissibility warning flag") {
  const GridPtr g = make_grid(3);
  const CovarianceSpec q = CovarianceSpec::single_mode(g, {1, 0}, 10.0);
  const NSEParams p = make_params(g, 1.0, 0.0, Complex(0.05, 0));
  const NoisePath path = NoisePath::generate(q, p.ou(), -2.0, 0.0, 0.01, 1);
  const RadiusPath rp = radius_path(path, q, p, 0.1, 2.0);
  CHECK_FALSE(rp.admissibility_ok);  // lambda1 = 1 < 4 * 10
}

TEST_CASE("absorption: trajectories enter and stay inside the radius") {
  const GridPtr g = make_grid(3);
  const double nu = 1.0, kappa = 7.0;
  const CovarianceSpec q = CovarianceSpec::power_law(g, 1e-3, 3.0);
  const NSEParams p = make_params(g, nu, kappa, Complex(0.05, 0));

  RealizationSpec rspec;
  rspec.t_end = 3.0;
  rspec.dt = 2e-3;
  rspec.t_burn = 20.0;
  rspec.burn_dt = 0.01;

  const int n_paths = 50;
  int ok = 0;
  for (int i = 0; i < n_paths; ++i) {
    const Realization real = make_realization(p, q, rspec, 9000 + i);
    const SpectralField x0 =
        sample_on_sphere(g, 10.0 * real.r0, 9000 + i, 1234);
    const Trajectory traj = integrate_transformed(x0, real.forward, p, 3.0, 2e-3);
    bool entered = false;
    bool stayed = true;
    for (int n = 0; n < traj.nodes(); ++n) {
      const double h_sq = traj.norm_at(n).h * traj.norm_at(n).h;
      const double r_sq = real.radius.r_sq_at(traj.time(n));
      if (!entered && h_sq <= r_sq) entered = true;
      else if (entered && h_sq > r_sq) stayed = false;
    }
    if (entered && stayed) ++ok;
  }
  CHECK(ok >= 48);  // 95% of 50
}
