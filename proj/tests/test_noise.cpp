// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/covariance.hpp"
#include "core/errors.hpp"
#include "core/ou.hpp"
#include "test_support.hpp"

using namespace detfun;
using namespace detfun::testing;

namespace {

double pair_mass(const SpectralField& z, int m) {
  const Vec2c c = z.coeff(m);
  return 2.0 * (std::norm(c[0]) + std::norm(c[1]));
}

}  // namespace

TEST_CASE("covariance traces and symbolic decay checks") {
  const GridPtr g = make_grid(4);
  const CovarianceSpec q = CovarianceSpec::power_law(g, 2.0, 4.0);
  double want_tr = 0, want_tra2 = 0;
  for (int m = 0; m < g->canonical_count(); ++m) {
    const double ksq = g->k_norm_sq(m);
    want_tr += 2.0 * std::pow(ksq, -4.0);
    want_tra2 += 2.0 * std::pow(ksq, -4.0) * (0.5 * ksq) * (0.5 * ksq);
  }
  CHECK(rel_err(q.trace(), want_tr) < 1e-13);
  CHECK(rel_err(q.trace_a2(), want_tra2) < 1e-13);
  CHECK(q.infinite_lattice_trace_finite());
  CHECK(q.infinite_lattice_trace_a2_finite());

  const CovarianceSpec q2 = CovarianceSpec::power_law(g, 1.0, 2.0);
  CHECK(q2.infinite_lattice_trace_finite());
  CHECK_FALSE(q2.infinite_lattice_trace_a2_finite());

  CHECK_THROWS_AS(CovarianceSpec::power_law(g, 1.0, 0.9), ConfigError);
  CHECK(CovarianceSpec::zero(g).is_zero());
}

TEST_CASE("wiener increments: variance, zero cases, dt validation") {
  const GridPtr g = make_grid(4);
  const CovarianceSpec q = CovarianceSpec::single_mode(g, {1, 0}, 1.0);
  const int m = g->canonical_index(1, 0);

  CHECK_THROWS_AS(sample_wiener_increment(q, 0.0, {1, 0}), ConfigError);
  CHECK(field_max_abs(sample_wiener_increment(CovarianceSpec::zero(g), 1.0, {1, 0})) == 0.0);

  const int n = 100000;
  double acc = 0;
  for (int i = 0; i < n; ++i)
    acc += pair_mass(sample_wiener_increment(q, 1.0, {9, static_cast<std::uint64_t>(i)}), m);
  acc /= n;
  CHECK(acc > 0.97);
  CHECK(acc < 1.03);
}

TEST_CASE("ou_step: exact decay fixture and long-run variance") {
  const GridPtr g = make_grid(4);
  const CovarianceSpec q0 = CovarianceSpec::zero(g);
  const OUParams p{0.0, 1.0};
  const SpectralField z0 = SpectralField::single_mode(g, {1, 0}, Complex(1, 0));

  // a = 1/2, rate 2(k+1) nu a = 1; dt = ln 2 halves the mode
  const SpectralField z1 = ou_step(z0, std::log(2.0), p, q0, {1, 1});
  CHECK(rel_err(std::abs(z1.amplitude(g->canonical_index(1, 0))), 0.5) < 1e-13);

  const SpectralField zfar = ou_step(z0, 200.0, p, q0, {1, 2});
  CHECK(field_max_abs(zfar) < 1e-30);

  // stationary-start chain preserves variance within 10%
  const CovarianceSpec q = CovarianceSpec::single_mode(g, {1, 0}, 1.0);
  const int m = g->canonical_index(1, 0);
  SpectralField z = ou_stationary_sample(p, q, {7, 0});
  const double dt = 0.5;
  double acc = 0;
  const int steps = 10000;
  for (int i = 0; i < steps; ++i) {
    z = ou_step(z, dt, p, q, {7, static_cast<std::uint64_t>(i + 1)});
    acc += pair_mass(z, m);
  }
  acc /= steps;
  const double want = 1.0 / (4.0 * 1.0 * 1.0 * 0.5);  // q/(4 (kappa+1) nu a) = 0.5
  CHECK(rel_err(acc, want) < 0.10);
}

TEST_CASE("stationary sampling variance and trace bound") {
  const GridPtr g = make_grid(4);
  const OUParams p{0.0, 1.0};
  const CovarianceSpec q1 = CovarianceSpec::single_mode(g, {1, 0}, 1.0);
  const int m = g->canonical_index(1, 0);
  const int n = 50000;
  double acc = 0;
  for (int i = 0; i < n; ++i)
    acc += pair_mass(ou_stationary_sample(p, q1, {11, static_cast<std::uint64_t>(i)}), m);
  acc /= n;
  CHECK(rel_err(acc, 0.5) < 0.03);

  CHECK(field_max_abs(ou_stationary_sample(p, CovarianceSpec::zero(g), {1, 0})) == 0.0);

  // tr Q~ <= tr Q / (2 lambda1 (kappa+1) nu), numerically on a power law
  const CovarianceSpec q = CovarianceSpec::power_law(g, 1.0, 2.0);
  const OUParams p2{3.0, 0.7};
  double tr_stationary = 0;
  for (int mm = 0; mm < g->canonical_count(); ++mm)
    tr_stationary += ou_stationary_pair_variance(p2, q, mm);
  CHECK(tr_stationary <= q.trace() / (2.0 * g->lambda1() * (p2.kappa + 1.0) * p2.nu) * (1 + 1e-12));
}

TEST_CASE("stationary moment closed form and Monte Carlo") {
  const GridPtr g = make_grid(4);
  const OUParams p{0.0, 1.0};
  const CovarianceSpec q1 = CovarianceSpec::single_mode(g, {1, 0}, 1.0);
  CHECK(stationary_moment(0.5, p, q1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(stationary_moment(1.0, p, CovarianceSpec::zero(g)) == 0.0);
  CHECK_THROWS_AS(stationary_moment(1.6, p, q1), ConfigError);
  CHECK_THROWS_AS(stationary_moment(-0.1, p, q1), ConfigError);

  const CovarianceSpec q = CovarianceSpec::power_law(g, 1.0, 2.0);
  const OUParams p2{2.0, 0.5};
  const int n = 20000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const SpectralField z = ou_stationary_sample(p2, q, {13, static_cast<std::uint64_t>(i)});
    const double a_half = a_power_norm(z, 1.0);  // ||A^{1/2} z||
    acc += a_half * a_half;
  }
  acc /= n;
  CHECK(rel_err(acc, stationary_moment(0.5, p2, q)) < 0.05);
}

TEST_CASE("gaussian even-moment factor (2l-1)!! bounds the fourth moment") {
  const GridPtr g = make_grid(4);
  const OUParams p{1.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::power_law(g, 1.0, 2.0);
  const int n = 20000;
  double m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const SpectralField z = ou_stationary_sample(p, q, {17, static_cast<std::uint64_t>(i)});
    const double sq = norm_h(z) * norm_h(z);
    m2 += sq;
    m4 += sq * sq;
  }
  m2 /= n;
  m4 /= n;
  // E||z||^4 <= 3 (E||z||^2)^2, with sampling slack
  CHECK(m4 <= 3.0 * m2 * m2 * 1.05);
}

TEST_CASE("chapman-kolmogorov: two steps match one in law") {
  // analytic: per-mode mean factor and variance compose exactly
  const double lambda = 0.8, q = 0.7, dt1 = 0.3, dt2 = 0.9;
  const double decay1 = std::exp(-lambda * dt1), decay2 = std::exp(-lambda * dt2);
  CHECK(rel_err(decay1 * decay2, std::exp(-lambda * (dt1 + dt2))) < 1e-14);
  auto var_of = [&](double dt) { return q * (-std::expm1(-2.0 * lambda * dt)) / (8.0 * lambda); };
  CHECK(rel_err(var_of(dt1) * decay2 * decay2 + var_of(dt2), var_of(dt1 + dt2)) < 1e-13);

  // sampled: composed chain vs direct transition, matching moments
  const GridPtr g = make_grid(4);
  const OUParams p{0.0, 1.0};
  const CovarianceSpec qs = CovarianceSpec::single_mode(g, {1, 0}, 1.0);
  const int m = g->canonical_index(1, 0);
  const SpectralField z0 = SpectralField::single_mode(g, {1, 0}, Complex(0.8, -0.3));
  const int n = 10000;
  double mass2 = 0, mass1 = 0;
  for (int i = 0; i < n; ++i) {
    const SpectralField za = ou_step(z0, 0.4, p, qs, {21, static_cast<std::uint64_t>(2 * i)});
    const SpectralField zb = ou_step(za, 0.6, p, qs, {21, static_cast<std::uint64_t>(2 * i + 1)});
    mass2 += pair_mass(zb, m);
    const SpectralField zc = ou_step(z0, 1.0, p, qs, {22, static_cast<std::uint64_t>(i)});
    mass1 += pair_mass(zc, m);
  }
  mass2 /= n;
  mass1 /= n;
  // identical second moments up to sampling error (3 sigma-ish band)
  CHECK(rel_err(mass2, mass1) < 0.06);
}

TEST_CASE("noise path: determinism, recursion consistency, shift, coarsen") {
  const GridPtr g = make_grid(3);
  const OUParams p{1.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::power_law(g, 0.5, 2.0);
  const NoisePath a = NoisePath::generate(q, p, 0.0, 2.0, 0.25, 77);
  const NoisePath b = NoisePath::generate(q, p, 0.0, 2.0, 0.25, 77);
  CHECK(a.steps() == 8);
  for (int i = 0; i <= a.steps(); ++i) CHECK(a.z(i).bit_equal(b.z(i)));
  for (int i = 0; i < a.steps(); ++i) CHECK(a.increment(i).bit_equal(b.increment(i)));

  const NoisePath c = NoisePath::generate(q, p, 0.0, 2.0, 0.25, 78);
  CHECK_FALSE(a.z(1).bit_equal(c.z(1)));

  const NoisePath shifted = a.shifted(1.0);
  CHECK(shifted.steps() == 4);
  CHECK(shifted.z(0).bit_equal(a.z(4)));
  CHECK(shifted.increment(0).bit_equal(a.increment(4)));

  const NoisePath coarse = a.coarsened(2);
  CHECK(coarse.steps() == 4);
  CHECK(coarse.dt() == doctest::Approx(0.5));
  CHECK(coarse.z(1).bit_equal(a.z(2)));
  SpectralField sum = a.increment(0);
  sum += a.increment(1);
  CHECK(coarse.increment(0).bit_equal(sum));

  CHECK_THROWS_AS(a.index_at(0.13), ConfigError);
  CHECK_THROWS_AS(a.coarsened(3), ConfigError);
}

TEST_CASE("noise path: z satisfies the exact OU recursion given the increments") {
  // decompose z_{i+1} - decay z_i into the increment-correlated part and
  // an independent remainder; the regression slope and residual variance
  // must match the exact conditional law of the stochastic convolution
  const GridPtr g = make_grid(3);
  const OUParams p{1.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::single_mode(g, {1, 0}, 2.0);
  const int m = g->canonical_index(1, 0);
  const double dt = 0.3;
  const double lambda = p.rate(g->a(m));
  const double decay = std::exp(-lambda * dt);

  const int n_paths = 4000;
  double cov_xw = 0, var_w = 0, resid_var = 0, resid_cross = 0;
  const double slope_want = -std::expm1(-lambda * dt) / (lambda * dt);
  for (int s = 0; s < n_paths; ++s) {
    const NoisePath path =
        NoisePath::generate(q, p, 0.0, 2.0 * dt, dt, 50000 + static_cast<std::uint64_t>(s));
    for (int i = 0; i < path.steps(); ++i) {
      const Complex conv = path.z(i + 1).amplitude(m) - decay * path.z(i).amplitude(m);
      const Complex dw = path.increment(i).amplitude(m);
      cov_xw += conv.real() * dw.real() + conv.imag() * dw.imag();
      var_w += std::norm(dw);
      const Complex resid = conv - slope_want * dw;
      resid_var += std::norm(resid);
      resid_cross += resid.real() * dw.real() + resid.imag() * dw.imag();
    }
  }
  const double slope_hat = cov_xw / var_w;
  CHECK(rel_err(slope_hat, slope_want) < 0.03);
  // residual decorrelated from the increment
  CHECK(std::abs(resid_cross / var_w) < 0.03);
  // residual variance matches the conditional law (per complex coefficient)
  const double q_val = 2.0;
  const double em1 = -std::expm1(-lambda * dt);
  const double em2 = -std::expm1(-2.0 * lambda * dt);
  const double bracket = 0.5 * em2 - em1 * em1 / (lambda * dt);
  const double resid_want = q_val / (2.0 * lambda) * bracket;  // times 2 parts
  CHECK(rel_err(resid_var / (n_paths * 2.0), resid_want) < 0.05);
}

TEST_CASE("noise path z marginals track the stationary law") {
  // the joint (increment, convolution) construction must leave the
  // stationary distribution invariant along the path
  const GridPtr g = make_grid(3);
  const OUParams p{0.0, 1.0};
  const CovarianceSpec q = CovarianceSpec::single_mode(g, {1, 0}, 1.0);
  const int m = g->canonical_index(1, 0);
  double acc = 0;
  const int n_paths = 400;
  const int steps = 40;
  for (int s = 0; s < n_paths; ++s) {
    const NoisePath path = NoisePath::generate(q, p, 0.0, steps * 0.25, 0.25,
                                               1000 + static_cast<std::uint64_t>(s));
    for (int i = 1; i <= steps; ++i) acc += pair_mass(path.z(i), m);
  }
  acc /= n_paths * steps;
  CHECK(rel_err(acc, 0.5) < 0.08);
}
