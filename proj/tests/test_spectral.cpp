// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/field.hpp"
#include "core/rng.hpp"
#include "core/transform.hpp"
#include "test_support.hpp"

using namespace detfun;
using namespace detfun::testing;

TEST_CASE("grid enumerates the half lattice") {
  const GridPtr g = make_grid(8);
  CHECK(g->canonical_count() == (17 * 17 - 1) / 2);  // 144
  CHECK(g->dealias_cutoff() == 5);
  CHECK(g->lambda1() == doctest::Approx(1.0));
  CHECK(g->canonical_index(0, 0) == -1);
  CHECK(g->canonical_index(9, 0) == -1);
  // k and -k share a slot
  CHECK(g->canonical_index(3, -2) == g->canonical_index(-3, 2));
  CHECK_THROWS_AS(SpectralGrid(1), ConfigError);
}

TEST_CASE("single mode fields are divergence-free and unit-normalizable") {
  const GridPtr g = make_grid(4);
  const SpectralField u = SpectralField::single_mode(g, {1, 0}, Complex(1.0 / std::sqrt(2.0), 0));
  CHECK(is_divergence_free(u));
  CHECK(norm_h(u) == doctest::Approx(1.0).epsilon(1e-14));
  // velocity of a (1,0) mode points along e2
  const Vec2c c = u.coeff(g->canonical_index(1, 0));
  CHECK(std::abs(c[0]) == doctest::Approx(0.0));
  CHECK(std::abs(c[1]) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("stokes powers: eigenvalue, identity, inverse") {
  const GridPtr g = make_grid(4);
  const Complex amp(0.3, -0.4);
  const SpectralField u10 = SpectralField::single_mode(g, {1, 0}, amp);
  const SpectralField s1 = apply_stokes(u10, 1.0);
  CHECK(field_max_abs_diff(s1, 0.5 * u10) < 1e-15);

  const SpectralField r = SpectralField::random(g, 7, 0);
  CHECK(field_max_abs_diff(apply_stokes(r, 0.0), r) == 0.0);

  const SpectralField u11 = SpectralField::single_mode(g, {1, 1}, amp);
  CHECK(field_max_abs_diff(apply_stokes(u11, -1.0), u11) < 1e-15);
}

TEST_CASE("stokes powers compose: s then t equals s+t") {
  const GridPtr g = make_grid(5);
  const SpectralField r = SpectralField::random(g, 11, 0);
  const SpectralField a = apply_stokes(apply_stokes(r, 0.7), -1.2);
  const SpectralField b = apply_stokes(r, -0.5);
  const double scale = field_max_abs(b);
  CHECK(field_max_abs_diff(a, b) <= 1e-12 * scale);
}

TEST_CASE("leray projection: gradients die, tangents pass, idempotent, self-adjoint") {
  const GridPtr g = make_grid(4);
  RawField grad(g);
  const int m = g->canonical_index(2, 1);
  grad.set_coeff(m, {Complex(2, 0.5), Complex(1, 0.25)});  // parallel to k = (2,1)
  const SpectralField pg = leray_project(grad);
  CHECK(field_max_abs(pg) < 1e-15);

  const SpectralField tang = SpectralField::single_mode(g, {2, 1}, Complex(1, 1));
  CHECK(field_max_abs_diff(leray_project(RawField::from(tang)), tang) < 1e-15);

  // w_(1,0) = (1,1) -> (0,1)
  RawField w(g);
  w.set_coeff(g->canonical_index(1, 0), {Complex(1, 0), Complex(1, 0)});
  const SpectralField pw = leray_project(w);
  const Vec2c c = pw.coeff(g->canonical_index(1, 0));
  CHECK(std::abs(c[0] - Complex(0, 0)) < 1e-15);
  CHECK(std::abs(c[1] - Complex(1, 0)) < 1e-15);

  // idempotent + H-self-adjoint in the raw coefficient inner product
  RawField a = RawField::from(SpectralField::random(g, 3, 1));
  RawField b = RawField::from(SpectralField::random(g, 4, 2));
  a.set_coeff(m, {Complex(1, 2), Complex(3, -1)});  // make it non-solenoidal
  b.set_coeff(m, {Complex(-2, 1), Complex(0.5, 0)});
  const SpectralField pa = leray_project(a);
  CHECK(field_max_abs_diff(leray_project(RawField::from(pa)), pa) < 1e-14);
  const SpectralField pb = leray_project(b);
  CHECK(inner_h_raw(RawField::from(pa), b) ==
        doctest::Approx(inner_h_raw(a, RawField::from(pb))).epsilon(1e-12));
  CHECK(is_divergence_free(pa));
}

TEST_CASE("norm bundle fixtures") {
  const GridPtr g = make_grid(4);
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  const SpectralField u10 = SpectralField::single_mode(g, {1, 0}, Complex(inv_s2, 0));
  const NormBundle n1 = norms(u10);
  CHECK(n1.h == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(n1.v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(n1.v_dual == doctest::Approx(1.0).epsilon(1e-14));

  const NormBundle nz = norms(SpectralField::zero(g));
  CHECK(nz.h == 0.0);
  CHECK(nz.v == 0.0);
  CHECK(nz.v_dual == 0.0);

  // orthogonal unit modes at |k| = 1 and |k| = sqrt 2
  SpectralField two = SpectralField::single_mode(g, {1, 0}, Complex(inv_s2, 0));
  two += SpectralField::single_mode(g, {1, 1}, Complex(inv_s2, 0));
  const NormBundle n2 = norms(two);
  CHECK(n2.h == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(n2.v == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("norm conventions: v = sqrt(2) hs(1), Poincare on random fields") {
  const GridPtr g = make_grid(6);
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralField r = SpectralField::random(g, 21, trial);
    const NormBundle n = norms(r);
    CHECK(rel_err(n.v, std::sqrt(2.0) * a_power_norm(r, 1.0)) < 1e-13);
    const double lambda1_a = g->a_min();
    CHECK(n.h <= n.v / std::sqrt(2.0 * lambda1_a) * (1 + 1e-12));
  }
}

TEST_CASE("physical synthesis is real and matches the trig form of Taylor-Green") {
  const GridPtr g = make_grid(4);
  const SpectralField tg = taylor_green(g);
  CHECK(is_divergence_free(tg));
  for (double x : {0.3, 1.7}) {
    for (double y : {0.0, 2.5}) {
      double u1, u2;
      eval_physical(tg, x, y, u1, u2);
      CHECK(u1 == doctest::Approx(std::sin(x) * std::cos(y)).epsilon(1e-12));
      CHECK(u2 == doctest::Approx(-std::cos(x) * std::sin(y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("snapshot round trip is bit exact") {
  const GridPtr g = make_grid(5);
  const SpectralField u = SpectralField::random(g, 33, 5);
  std::stringstream ss;
  write_snapshot(ss, u, 1.2345678901234567);
  double t = 0;
  const SpectralField back = read_snapshot(ss, &t);
  CHECK(t == 1.2345678901234567);
  CHECK(back.bit_equal(u));
}

TEST_CASE("snapshot rejects malformed content") {
  std::stringstream ss("bogus\n");
  CHECK_THROWS_AS(read_snapshot(ss), ConfigError);
}

TEST_CASE("grid mismatch is rejected") {
  const SpectralField a = SpectralField::random(make_grid(4), 1, 0);
  const SpectralField b = SpectralField::random(make_grid(5), 1, 0);
  CHECK_THROWS_AS(nonlinear_term(a, b), ConfigError);
  CHECK_THROWS_AS(inner_h(a, b), ConfigError);
}

TEST_CASE("counter rng: determinism, moments, stream independence") {
  const auto [a1, a2] = rng::normal_pair(42, 7, 99);
  const auto [b1, b2] = rng::normal_pair(42, 7, 99);
  CHECK(a1 == b1);
  CHECK(a2 == b2);
  const auto [c1, c2] = rng::normal_pair(43, 7, 99);
  CHECK(a1 != c1);

  const int n = 200000;
  double mean = 0, var = 0;
  for (int i = 0; i < n; ++i) {
    const auto [g1, g2] = rng::normal_pair(5, 1, i);
    mean += g1 + g2;
    var += g1 * g1 + g2 * g2;
  }
  mean /= 2 * n;
  var /= 2 * n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.01);

  // distinct streams decorrelate
  double cross = 0;
  for (int i = 0; i < n / 4; ++i) {
    const auto [g1, unused1] = rng::normal_pair(5, 1, i);
    const auto [g2, unused2] = rng::normal_pair(5, 2, i);
    cross += g1 * g2;
  }
  CHECK(std::abs(cross / (n / 4)) < 0.02);
}
