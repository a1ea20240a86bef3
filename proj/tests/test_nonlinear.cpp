// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/field.hpp"
#include "core/transform.hpp"
#include "test_support.hpp"

using namespace detfun;
using namespace detfun::testing;

TEST_CASE("single shear mode self-advects to zero") {
  const GridPtr g = make_grid(4);
  const SpectralField u = SpectralField::single_mode(g, {1, 0}, Complex(0.7, 0.2));
  const SpectralField b = nonlinear_term(u, u);
  CHECK(field_max_abs(b) < 1e-14);
  // cross-check with the convolution oracle
  CHECK(field_max_abs(convolution_oracle(u, u)) < 1e-14);
}

TEST_CASE("Taylor-Green self-advection is a pure gradient") {
  const GridPtr g = make_grid(4);
  const SpectralField tg = taylor_green(g);
  const double scale = norm_h(tg) * std::sqrt(2.0) * a_power_norm(tg, 1.0);
  CHECK(field_max_abs(nonlinear_term(tg, tg)) < 1e-12 * std::max(1.0, scale));
  CHECK(field_max_abs(convolution_oracle(tg, tg)) < 1e-12);
}

TEST_CASE("zero input gives zero") {
  const GridPtr g = make_grid(4);
  const SpectralField z = SpectralField::zero(g);
  const SpectralField r = SpectralField::random(g, 2, 0, true);
  CHECK(field_max_abs(nonlinear_term(z, r)) == 0.0);
  CHECK(field_max_abs(nonlinear_term(r, z)) == 0.0);
}

TEST_CASE("pseudospectral kernel matches the convolution oracle") {
  for (int n : {3, 4, 5}) {
    const GridPtr g = make_grid(n);
    for (int trial = 0; trial < 4; ++trial) {
      const SpectralField u = SpectralField::random(g, 100 + n, trial, true);
      const SpectralField v = SpectralField::random(g, 200 + n, trial, true);
      const SpectralField fast = nonlinear_term(u, v);
      const SpectralField slow = convolution_oracle(u, v);
      const double scale = std::max(field_max_abs(slow), 1e-30);
      CHECK(field_max_abs_diff(fast, slow) / scale < 1e-10);
    }
  }
}

TEST_CASE("bilinearity") {
  const GridPtr g = make_grid(4);
  const SpectralField u = SpectralField::random(g, 31, 0, true);
  const SpectralField v = SpectralField::random(g, 32, 0, true);
  const SpectralField w = SpectralField::random(g, 33, 0, true);
  const SpectralField lhs = nonlinear_term(u, v + w);
  SpectralField rhs = nonlinear_term(u, v);
  rhs += nonlinear_term(u, w);
  const double scale = std::max(field_max_abs(rhs), 1e-30);
  CHECK(field_max_abs_diff(lhs, rhs) / scale < 1e-11);

  const SpectralField lhs2 = nonlinear_term(2.5 * u, v);
  const SpectralField rhs2 = 2.5 * nonlinear_term(u, v);
  CHECK(field_max_abs_diff(lhs2, rhs2) / scale < 1e-11);
}

TEST_CASE("skew symmetry of the advective pairing") {
  const GridPtr g = make_grid(5);
  for (int trial = 0; trial < 25; ++trial) {
    const SpectralField u = SpectralField::random(g, 51, trial, true);
    const SpectralField v = SpectralField::random(g, 52, trial, true);
    const double pairing = inner_h(nonlinear_term(u, v), v);
    const double scale = norm_h(u) * norm_h(v) * norm_h(v);
    CHECK(std::abs(pairing) <= 1e-10 * std::max(scale, 1e-30));
  }
}

TEST_CASE("dealiasing zeroes the high modes") {
  const GridPtr g = make_grid(6);
  const SpectralField r = SpectralField::random(g, 61, 0);
  const SpectralField rd = dealias(r);
  for (int m = 0; m < g->canonical_count(); ++m) {
    const Mode& k = g->mode(m);
    const Vec2c c = rd.coeff(m);
    if (std::abs(k.k1) > g->dealias_cutoff() || std::abs(k.k2) > g->dealias_cutoff()) {
      CHECK(std::abs(c[0]) == 0.0);
      CHECK(std::abs(c[1]) == 0.0);
    }
  }
  // output of the bilinear term is supported on the dealiased range
  const SpectralField b = nonlinear_term(r, r);
  for (int m = 0; m < g->canonical_count(); ++m) {
    const Mode& k = g->mode(m);
    if (std::abs(k.k1) > g->dealias_cutoff() || std::abs(k.k2) > g->dealias_cutoff()) {
      const Vec2c c = b.coeff(m);
      CHECK(std::abs(c[0]) == 0.0);
      CHECK(std::abs(c[1]) == 0.0);
    }
  }
}

TEST_CASE("advective output is divergence-free") {
  const GridPtr g = make_grid(5);
  const SpectralField u = SpectralField::random(g, 71, 3, true);
  const SpectralField v = SpectralField::random(g, 72, 3, true);
  CHECK(is_divergence_free(nonlinear_term(u, v), 1e-12));
}
