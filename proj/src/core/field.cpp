// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace detfun {

SpectralField::SpectralField(GridPtr grid)
    : grid_(std::move(grid)), psi_(static_cast<std::size_t>(grid_->canonical_count())) {}

SpectralField SpectralField::zero(GridPtr grid) { return SpectralField(std::move(grid)); }

SpectralField SpectralField::single_mode(GridPtr grid, Mode k, Complex psi) {
  SpectralField u(std::move(grid));
  const int m = u.grid().canonical_index(k.k1, k.k2);
  if (m < 0) throw ConfigError("single_mode: wavevector outside the lattice");
  u.psi_[m] = psi;
  return u;
}

SpectralField SpectralField::from_amplitudes(GridPtr grid, const std::vector<Complex>& psi) {
  SpectralField u(std::move(grid));
  if (psi.size() != u.psi_.size())
    throw ConfigError("from_amplitudes: amplitude count does not match the grid");
  u.psi_ = psi;
  return u;
}

SpectralField SpectralField::random(GridPtr grid, std::uint64_t seed, std::uint64_t counter,
                                    bool dealiased_support) {
  SpectralField u(std::move(grid));
  const SpectralGrid& g = u.grid();
  const int cutoff = g.dealias_cutoff();
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    if (dealiased_support && (std::abs(k.k1) > cutoff || std::abs(k.k2) > cutoff)) continue;
    const auto [g1, g2] = rng::normal_pair(
        seed, rng::mode_stream(rng::Channel::field_sample, k.k1, k.k2), counter);
    u.psi_[m] = 0.5 * Complex(g1, g2);  // E|psi|^2 = 1/2, pair mass 1
  }
  return u;
}

Vec2c SpectralField::coeff(int m) const {
  double e1, e2;
  grid_->tangent(m, e1, e2);
  return {psi_[m] * e1, psi_[m] * e2};
}

Vec2c SpectralField::coeff_at(int k1, int k2) const {
  const int m = grid_->canonical_index(k1, k2);
  if (m < 0) return {Complex(0), Complex(0)};
  Vec2c v = coeff(m);
  const Mode& km = grid_->mode(m);
  if (km.k1 != k1 || km.k2 != k2) {
    v[0] = std::conj(v[0]);
    v[1] = std::conj(v[1]);
  }
  return v;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t i = 0; i < psi_.size(); ++i) psi_[i] += o.psi_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t i = 0; i < psi_.size(); ++i) psi_[i] -= o.psi_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : psi_) c *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
  require_same_grid(*this, o, "axpy");
  for (std::size_t i = 0; i < psi_.size(); ++i) psi_[i] += s * o.psi_[i];
}

bool SpectralField::bit_equal(const SpectralField& o) const {
  if (*grid_ != *o.grid_) return false;
  for (std::size_t i = 0; i < psi_.size(); ++i)
    if (psi_[i] != o.psi_[i]) return false;
  return true;
}

RawField::RawField(GridPtr g)
    : grid(std::move(g)), c(2 * static_cast<std::size_t>(grid->canonical_count())) {}

RawField RawField::from(const SpectralField& u) {
  RawField w(u.grid_ptr());
  for (int m = 0; m < u.grid().canonical_count(); ++m) w.set_coeff(m, u.coeff(m));
  return w;
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* op) {
  if (a.grid() != b.grid())
    throw ConfigError(std::string(op) + ": operands live on different grids");
}

double inner_h(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u, v, "inner_h");
  double acc = 0;
  const Complex* a = u.data();
  const Complex* b = v.data();
  for (std::size_t i = 0; i < u.size(); ++i)
    acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return 2.0 * acc;
}

double norm_h(const SpectralField& u) { return std::sqrt(inner_h(u, u)); }

double a_power_norm(const SpectralField& u, double s) {
  const SpectralGrid& g = u.grid();
  double acc = 0;
  for (int m = 0; m < g.canonical_count(); ++m) {
    const double mass = std::norm(u.amplitude(m));
    acc += (s == 0.0 ? mass : std::pow(g.a(m), s) * mass);
  }
  return std::sqrt(2.0 * acc);
}

NormBundle norms(const SpectralField& u) {
  NormBundle n;
  n.h = norm_h(u);
  n.v = std::sqrt(2.0) * a_power_norm(u, 1.0);
  n.v_dual = a_power_norm(u, -1.0) / std::sqrt(2.0);
  return n;
}

double inner_h_raw(const RawField& a, const RawField& b) {
  if (*a.grid != *b.grid) throw ConfigError("inner_h_raw: grid mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < a.c.size(); ++i)
    acc += a.c[i].real() * b.c[i].real() + a.c[i].imag() * b.c[i].imag();
  return 2.0 * acc;
}

SpectralField apply_stokes(const SpectralField& u, double s) {
  SpectralField out = u;
  if (s == 0.0) return out;
  const SpectralGrid& g = u.grid();
  for (int m = 0; m < g.canonical_count(); ++m)
    out.set_amplitude(m, out.amplitude(m) * std::pow(g.a(m), s));
  return out;
}

SpectralField leray_project(const RawField& w) {
  SpectralField out = SpectralField::zero(w.grid);
  const SpectralGrid& g = *w.grid;
  for (int m = 0; m < g.canonical_count(); ++m) {
    double e1, e2;
    g.tangent(m, e1, e2);
    const Vec2c c = w.coeff(m);
    out.set_amplitude(m, e1 * c[0] + e2 * c[1]);
  }
  return out;
}

double divergence_residual(const RawField& w) {
  const SpectralGrid& g = *w.grid;
  double worst = 0;
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    const Vec2c c = w.coeff(m);
    const double mag = std::sqrt(std::norm(c[0]) + std::norm(c[1]));
    if (mag == 0) continue;
    const double div = std::abs(static_cast<double>(k.k1) * c[0] +
                                static_cast<double>(k.k2) * c[1]);
    worst = std::max(worst, div / (std::sqrt(g.k_norm_sq(m)) * mag));
  }
  return worst;
}

double divergence_residual(const SpectralField& u) {
  return divergence_residual(RawField::from(u));
}

bool is_divergence_free(const SpectralField& u, double rel_tol) {
  return divergence_residual(u) <= rel_tol;
}

namespace {

void write_double(std::ostream& os, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& u, double time) {
  const SpectralGrid& g = u.grid();
  os << "n_max,period,time\n" << g.n_max() << ",";
  write_double(os, g.period());
  os << ",";
  write_double(os, time);
  os << "\nk1,k2,re,im\n";
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    const Complex psi = u.amplitude(m);
    os << k.k1 << "," << k.k2 << ",";
    write_double(os, psi.real());
    os << ",";
    write_double(os, psi.imag());
    os << "\n";
  }
}

SpectralField read_snapshot(std::istream& is, double* time_out) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("n_max", 0) != 0)
    throw ConfigError("read_snapshot: missing header");
  if (!std::getline(is, line)) throw ConfigError("read_snapshot: truncated header");
  int n_max = 0;
  double period = 0, time = 0;
  if (std::sscanf(line.c_str(), "%d,%lf,%lf", &n_max, &period, &time) != 3)
    throw ConfigError("read_snapshot: malformed header row");
  if (!std::getline(is, line) || line.rfind("k1", 0) != 0)
    throw ConfigError("read_snapshot: missing column header");
  GridPtr grid = make_grid(n_max);
  std::vector<Complex> psi(static_cast<std::size_t>(grid->canonical_count()));
  std::vector<bool> seen(psi.size(), false);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    int k1 = 0, k2 = 0;
    double re = 0, im = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &k1, &k2, &re, &im) != 4)
      throw ConfigError("read_snapshot: malformed coefficient row: " + line);
    const int m = grid->canonical_index(k1, k2);
    if (m < 0) throw ConfigError("read_snapshot: mode outside lattice");
    psi[m] = Complex(re, im);
    seen[m] = true;
  }
  for (std::size_t m = 0; m < seen.size(); ++m)
    if (!seen[m]) throw ConfigError("read_snapshot: missing coefficient rows");
  if (time_out) *time_out = time;
  return SpectralField::from_amplitudes(std::move(grid), psi);
}

void write_snapshot_file(const std::string& path, const SpectralField& u, double time) {
  std::ofstream os(path);
  if (!os) throw ConfigError("write_snapshot_file: cannot open " + path);
  write_snapshot(os, u, time);
}

SpectralField read_snapshot_file(const std::string& path, double* time_out) {
  std::ifstream is(path);
  if (!is) throw ConfigError("read_snapshot_file: cannot open " + path);
  return read_snapshot(is, time_out);
}

}  // namespace detfun
