// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/transform.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "core/errors.hpp"

namespace detfun {

DftPlan::DftPlan(int n_max) : n_(n_max), m_(2 * n_max + 1) {
  e_.resize(static_cast<std::size_t>(m_) * m_);
  for (int j = 0; j < m_; ++j)
    for (int i = 0; i < m_; ++i) {
      const double phase = 2.0 * M_PI * j * (i - n_) / m_;
      e_[static_cast<std::size_t>(j) * m_ + i] = Complex(std::cos(phase), std::sin(phase));
    }
}

void DftPlan::synthesize(const std::vector<Complex>& coef, std::vector<Complex>& phys) const {
  const int m = m_;
  std::vector<Complex> tmp(static_cast<std::size_t>(m) * m);
  // pass over the first index: tmp[j1][i2] = sum_i1 e[j1][i1] coef[i1][i2]
  for (int j1 = 0; j1 < m; ++j1) {
    const Complex* row = &e_[static_cast<std::size_t>(j1) * m];
    Complex* out = &tmp[static_cast<std::size_t>(j1) * m];
    for (int i2 = 0; i2 < m; ++i2) out[i2] = Complex(0);
    for (int i1 = 0; i1 < m; ++i1) {
      const Complex w = row[i1];
      const Complex* src = &coef[static_cast<std::size_t>(i1) * m];
      for (int i2 = 0; i2 < m; ++i2) out[i2] += w * src[i2];
    }
  }
  phys.assign(static_cast<std::size_t>(m) * m, Complex(0));
  // pass over the second index: phys[j1][j2] = sum_i2 e[j2][i2] tmp[j1][i2]
  for (int j1 = 0; j1 < m; ++j1) {
    const Complex* src = &tmp[static_cast<std::size_t>(j1) * m];
    Complex* out = &phys[static_cast<std::size_t>(j1) * m];
    for (int j2 = 0; j2 < m; ++j2) {
      const Complex* row = &e_[static_cast<std::size_t>(j2) * m];
      Complex acc(0);
      for (int i2 = 0; i2 < m; ++i2) acc += row[i2] * src[i2];
      out[j2] = acc;
    }
  }
}

void DftPlan::analyze(const std::vector<Complex>& phys, std::vector<Complex>& coef) const {
  const int m = m_;
  const double scale = 1.0 / m;
  std::vector<Complex> tmp(static_cast<std::size_t>(m) * m);
  // tmp[i1][j2] = (1/m) sum_j1 conj(e[j1][i1]) phys[j1][j2]
  for (int i1 = 0; i1 < m; ++i1) {
    Complex* out = &tmp[static_cast<std::size_t>(i1) * m];
    for (int j2 = 0; j2 < m; ++j2) out[j2] = Complex(0);
    for (int j1 = 0; j1 < m; ++j1) {
      const Complex w = std::conj(e_[static_cast<std::size_t>(j1) * m + i1]);
      const Complex* src = &phys[static_cast<std::size_t>(j1) * m];
      for (int j2 = 0; j2 < m; ++j2) out[j2] += w * src[j2];
    }
    for (int j2 = 0; j2 < m; ++j2) out[j2] *= scale;
  }
  coef.assign(static_cast<std::size_t>(m) * m, Complex(0));
  // coef[i1][i2] = (1/m) sum_j2 conj(e[j2][i2]) tmp[i1][j2]
  for (int i1 = 0; i1 < m; ++i1) {
    const Complex* src = &tmp[static_cast<std::size_t>(i1) * m];
    Complex* out = &coef[static_cast<std::size_t>(i1) * m];
    for (int i2 = 0; i2 < m; ++i2) {
      Complex acc(0);
      for (int j2 = 0; j2 < m; ++j2) acc += std::conj(e_[static_cast<std::size_t>(j2) * m + i2]) * src[j2];
      out[i2] = acc * scale;
    }
  }
}

const DftPlan& plan_for(int n_max) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<DftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n_max);
  if (it == cache.end())
    it = cache.emplace(n_max, std::make_unique<DftPlan>(n_max)).first;
  return *it->second;
}

SpectralField dealias(const SpectralField& u) {
  SpectralField out = u;
  const SpectralGrid& g = u.grid();
  const int cutoff = g.dealias_cutoff();
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Mode& k = g.mode(m);
    if (std::abs(k.k1) > cutoff || std::abs(k.k2) > cutoff)
      out.set_amplitude(m, Complex(0));
  }
  return out;
}

namespace {

// Scatter one canonical-component plane to the dense lattice (both halves).
void to_dense(const SpectralField& u, int comp, int n, std::vector<Complex>& dense) {
  const int m = 2 * n + 1;
  dense.assign(static_cast<std::size_t>(m) * m, Complex(0));
  const SpectralGrid& g = u.grid();
  for (int idx = 0; idx < g.canonical_count(); ++idx) {
    const Mode& k = g.mode(idx);
    const Complex c = u.coeff(idx)[comp];
    dense[static_cast<std::size_t>(k.k1 + n) * m + (k.k2 + n)] = c;
    dense[static_cast<std::size_t>(-k.k1 + n) * m + (-k.k2 + n)] = std::conj(c);
  }
}

}  // namespace

SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v) {
  NonlinearWorkspace ws;
  return nonlinear_term(u, v, ws);
}

SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v,
                             NonlinearWorkspace& ws) {
  require_same_grid(u, v, "nonlinear_term");
  const SpectralGrid& g = u.grid();
  const int n = g.n_max();
  const int m = 2 * n + 1;
  const int cutoff = g.dealias_cutoff();
  const DftPlan& plan = plan_for(n);

  const SpectralField ud = dealias(u);
  const SpectralField vd = dealias(v);

  to_dense(ud, 0, n, ws.ca);
  plan.synthesize(ws.ca, ws.u1);
  to_dense(ud, 1, n, ws.ca);
  plan.synthesize(ws.ca, ws.u2);

  RawField out(u.grid_ptr());
  const std::size_t npts = static_cast<std::size_t>(m) * m;
  std::vector<std::vector<Complex>> result(2);
  for (int comp = 0; comp < 2; ++comp) {
    to_dense(vd, comp, n, ws.ca);
    // derivative planes i k1 * v, i k2 * v
    ws.cb.assign(npts, Complex(0));
    for (int i1 = 0; i1 < m; ++i1)
      for (int i2 = 0; i2 < m; ++i2) {
        const Complex c = ws.ca[static_cast<std::size_t>(i1) * m + i2];
        ws.cb[static_cast<std::size_t>(i1) * m + i2] = Complex(0, i1 - n) * c;
      }
    plan.synthesize(ws.cb, ws.d1);
    for (int i1 = 0; i1 < m; ++i1)
      for (int i2 = 0; i2 < m; ++i2) {
        const Complex c = ws.ca[static_cast<std::size_t>(i1) * m + i2];
        ws.cb[static_cast<std::size_t>(i1) * m + i2] = Complex(0, i2 - n) * c;
      }
    plan.synthesize(ws.cb, ws.d2);
    ws.out.resize(npts);
    for (std::size_t i = 0; i < npts; ++i)
      ws.out[i] = ws.u1[i] * ws.d1[i] + ws.u2[i] * ws.d2[i];
    plan.analyze(ws.out, ws.ca);
    result[comp] = ws.ca;
  }

  for (int idx = 0; idx < g.canonical_count(); ++idx) {
    const Mode& k = g.mode(idx);
    if (std::abs(k.k1) > cutoff || std::abs(k.k2) > cutoff) continue;
    Vec2c c;
    for (int comp = 0; comp < 2; ++comp) {
      const Complex direct =
          result[comp][static_cast<std::size_t>(k.k1 + n) * m + (k.k2 + n)];
      const Complex mirrored =
          result[comp][static_cast<std::size_t>(-k.k1 + n) * m + (-k.k2 + n)];
      // symmetrize so the reality constraint is exact
      c[comp] = 0.5 * (direct + std::conj(mirrored));
    }
    out.set_coeff(idx, c);
  }
  return leray_project(out);
}

double sup_norm_bound(const SpectralField& u) {
  double acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::abs(u.data()[i]);
  return 2.0 * acc;
}

}  // namespace detfun
