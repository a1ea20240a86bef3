// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_TESTS_TEST_SUPPORT_HPP
#define DETFUN_TESTS_TEST_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "core/field.hpp"
#include "core/transform.hpp"

namespace detfun::testing {

// --- independent oracles (no shared code with the implementation paths) ---

/// Direct O(modes^2) convolution of P[(u . grad) v] on the dealiased
/// support: w_i(k) = sum_{p+q=k} (u(p) . iq) v_i(q), then Leray projection.
inline SpectralField convolution_oracle(const SpectralField& u, const SpectralField& v) {
  const SpectralGrid& g = u.grid();
  const int d = g.dealias_cutoff();
  RawField out(u.grid_ptr());
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    if (std::abs(k.k1) > d || std::abs(k.k2) > d) continue;
    Vec2c acc = {Complex(0), Complex(0)};
    for (int p1 = -d; p1 <= d; ++p1)
      for (int p2 = -d; p2 <= d; ++p2) {
        if (p1 == 0 && p2 == 0) continue;
        const int q1 = k.k1 - p1;
        const int q2 = k.k2 - p2;
        if ((q1 == 0 && q2 == 0) || std::abs(q1) > d || std::abs(q2) > d) continue;
        const Vec2c up = u.coeff_at(p1, p2);
        const Vec2c vq0 = v.coeff_at(q1, q2);
        // (u(p) . i q) v(q)
        const Complex advect =
            Complex(0, 1) * (up[0] * static_cast<double>(q1) + up[1] * static_cast<double>(q2));
        acc[0] += advect * vq0[0];
        acc[1] += advect * vq0[1];
      }
    out.set_coeff(m, acc);
  }
  return leray_project(out);
}

/// Physical velocity from the coefficients by direct summation.
inline void eval_physical(const SpectralField& u, double x1, double x2, double& u1,
                          double& u2) {
  const SpectralGrid& g = u.grid();
  Complex a1(0), a2(0);
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    const Complex phase = std::exp(Complex(0, k.k1 * x1 + k.k2 * x2));
    const Vec2c c = u.coeff(m);
    a1 += c[0] * phase;
    a2 += c[1] * phase;
  }
  u1 = 2.0 * a1.real();
  u2 = 2.0 * a2.real();
}

/// Disk average of one velocity component by composite-Simpson quadrature
/// in polar coordinates (independent of the Bessel closed form).
inline double disk_average_quadrature(const SpectralField& u, int comp, double x0,
                                      double y0, double radius) {
  const int n_rho = 200;   // Simpson (even)
  const int n_theta = 256; // trapezoid, exact for trig polynomials
  double integral = 0;
  for (int i = 0; i <= n_rho; ++i) {
    const double rho = radius * i / n_rho;
    double ring = 0;
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * M_PI * j / n_theta;
      double u1, u2;
      eval_physical(u, x0 + rho * std::cos(th), y0 + rho * std::sin(th), u1, u2);
      ring += (comp == 0 ? u1 : u2);
    }
    ring *= 2.0 * M_PI / n_theta;
    const double w = (i == 0 || i == n_rho) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    integral += w * ring * rho;
  }
  integral *= radius / n_rho / 3.0;
  return integral / (M_PI * radius * radius);
}

/// Taylor-Green cell (sin x1 cos x2, -cos x1 sin x2).
inline SpectralField taylor_green(GridPtr grid) {
  const double amp = 1.0 / (2.0 * std::sqrt(2.0));
  SpectralField u = SpectralField::single_mode(grid, {1, 1}, Complex(0, amp));
  u += SpectralField::single_mode(grid, {-1, 1}, Complex(0, -amp));
  return u;
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

inline double field_max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

inline double field_max_abs(const SpectralField& a) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i]));
  return worst;
}

}  // namespace detfun::testing

#endif
