// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_TRANSFORM_HPP
#define DETFUN_CORE_TRANSFORM_HPP

#include <vector>

#include "core/field.hpp"

namespace detfun {

// Dense DFT between the (2n+1)^2 coefficient lattice and the physical
// collocation grid of the same size. Lattice sizes here are tiny, so the
// transform is a precomputed matrix product; with inputs truncated to the
// dealias cutoff this grid is alias-free for quadratic products
// (2n+1 > 3 * floor(2n/3)).
class DftPlan {
 public:
  explicit DftPlan(int n_max);

  int n() const { return n_; }
  int m() const { return m_; }  // points per dimension, 2n+1

  // Dense lattice layout: index i = k + n per dimension, row-major
  // [i1 * m + i2]. Physical layout: [j1 * m + j2], x_j = 2 pi j / m.
  void synthesize(const std::vector<Complex>& coef, std::vector<Complex>& phys) const;
  void analyze(const std::vector<Complex>& phys, std::vector<Complex>& coef) const;

 private:
  int n_, m_;
  std::vector<Complex> e_;  // e_[j * m + i] = exp(2 pi i j (i - n) / m)
  mutable std::vector<Complex> unused_;
};

/// Shared plan for a lattice size (plans are immutable once built).
const DftPlan& plan_for(int n_max);

struct NonlinearWorkspace {
  std::vector<Complex> ca, cb;       // dense coefficient planes
  std::vector<Complex> u1, u2;       // physical advecting components
  std::vector<Complex> d1, d2, out;  // physical derivative/product planes
};

/// Zero all modes with max(|k1|, |k2|) above the grid's dealias cutoff.
SpectralField dealias(const SpectralField& u);

/// P[(u . grad) v], pseudospectral with 2/3-rule dealiasing and Leray
/// projection. Bilinear; rejects mismatched grids.
SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v);
SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v,
                             NonlinearWorkspace& ws);

/// l1 coefficient bound on sup_x |u(x)| per component (cheap CFL proxy).
double sup_norm_bound(const SpectralField& u);

}  // namespace detfun

#endif
