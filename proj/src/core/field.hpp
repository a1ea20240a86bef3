// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_FIELD_HPP
#define DETFUN_CORE_FIELD_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace detfun {

using Complex = std::complex<double>;
using Vec2c = std::array<Complex, 2>;

// Divergence-free velocity field on the torus, stored as one complex
// amplitude psi_k per canonical mode along the unit divergence-free
// direction e_k = (-k2, k1)/|k|; the velocity coefficient is
// u_k = psi_k e_k and the conjugate half is implied. Reality and
// incompressibility are exact by construction.
//
// The H inner product is the L2 product with respect to normalized
// Lebesgue measure: <u,v>_H = sum over the full lattice of conj(psi) psi
// = 2 Re sum over canonical modes.
class SpectralField {
 public:
  explicit SpectralField(GridPtr grid);

  static SpectralField zero(GridPtr grid);
  /// Amplitude psi on the canonical representative of the pair {k, -k}.
  static SpectralField single_mode(GridPtr grid, Mode k, Complex psi);
  static SpectralField from_amplitudes(GridPtr grid, const std::vector<Complex>& psi);
  /// Gaussian amplitudes, unit variance per mode pair; optionally
  /// restricted to the dealiased range.
  static SpectralField random(GridPtr grid, std::uint64_t seed, std::uint64_t counter,
                              bool dealiased_support = false);

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  Complex amplitude(int m) const { return psi_[m]; }
  void set_amplitude(int m, Complex v) { psi_[m] = v; }

  /// Velocity coefficient psi e_k of the canonical mode m.
  Vec2c coeff(int m) const;
  /// Velocity coefficient of an arbitrary lattice mode (conjugated as
  /// needed); zero outside the lattice.
  Vec2c coeff_at(int k1, int k2) const;

  std::size_t size() const { return psi_.size(); }
  const Complex* data() const { return psi_.data(); }
  Complex* data() { return psi_.data(); }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  void axpy(double s, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    a += b;
    return a;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    a -= b;
    return a;
  }
  friend SpectralField operator*(double s, SpectralField a) {
    a *= s;
    return a;
  }

  bool bit_equal(const SpectralField& o) const;

 private:
  GridPtr grid_;
  std::vector<Complex> psi_;
};

// Unconstrained Fourier velocity field (two coefficients per canonical
// mode), the input type of the Leray projection.
struct RawField {
  GridPtr grid;
  std::vector<Complex> c;  // [2m], [2m+1]: components of canonical mode m

  explicit RawField(GridPtr g);
  static RawField from(const SpectralField& u);

  Vec2c coeff(int m) const { return {c[2 * m], c[2 * m + 1]}; }
  void set_coeff(int m, Vec2c v) {
    c[2 * m] = v[0];
    c[2 * m + 1] = v[1];
  }
};

struct NormBundle {
  double h = 0;       // L2 (H) norm
  double v = 0;       // ||grad .|| = sqrt(2) ||A^{1/2} .||_H
  double v_dual = 0;  // (1/sqrt(2)) ||A^{-1/2} .||_H
};

double inner_h(const SpectralField& u, const SpectralField& v);
double norm_h(const SpectralField& u);
/// ||A^{s/2} u||_H for any real s (no zero mode, so negative s is fine).
double a_power_norm(const SpectralField& u, double s);
NormBundle norms(const SpectralField& u);

double inner_h_raw(const RawField& a, const RawField& b);

/// Per-mode multiplication by a_k^s, a_k = |k|^2/2.
SpectralField apply_stokes(const SpectralField& u, double s);

/// Per-mode projection (I - k k^T/|k|^2); keeps the tangential amplitude
/// e_k . w_k. Idempotent and H-self-adjoint.
SpectralField leray_project(const RawField& w);

/// Relative divergence residual of a raw field, max_k |k.w_k|/(|k||w_k|).
double divergence_residual(const RawField& w);
/// Residual of the velocity coefficients of a stored field (rounding
/// noise of the tangent basis only; exact zero analytically).
double divergence_residual(const SpectralField& u);
bool is_divergence_free(const SpectralField& u, double rel_tol = 1e-12);

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* op);

// Snapshot file format: two header lines (n_max, period, time), then one
// CSV row (k1, k2, re, im) per canonical mode holding the divergence-free
// amplitude. Doubles serialized at 17 significant digits round-trip
// bit-exactly.
void write_snapshot(std::ostream& os, const SpectralField& u, double time);
SpectralField read_snapshot(std::istream& is, double* time_out = nullptr);
void write_snapshot_file(const std::string& path, const SpectralField& u, double time);
SpectralField read_snapshot_file(const std::string& path, double* time_out = nullptr);

}  // namespace detfun

#endif
