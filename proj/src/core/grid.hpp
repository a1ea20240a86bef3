// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_GRID_HPP
#define DETFUN_CORE_GRID_HPP

#include <memory>
#include <vector>

namespace detfun {

struct Mode {
  int k1 = 0;
  int k2 = 0;
};

inline bool operator==(Mode a, Mode b) { return a.k1 == b.k1 && a.k2 == b.k2; }

// Truncated Fourier lattice on the 2pi-periodic torus: wavevectors with
// max(|k1|, |k2|) <= n_max, the zero mode excluded (fields are mean-zero).
// Storage is the canonical half-lattice, k2 > 0 or (k2 == 0 and k1 > 0);
// the other half is determined by the reality constraint. Quadratic
// products are alias-free on modes with max-norm <= dealias_cutoff
// (2/3 rule, floor(2 n_max / 3)).
//
// The Stokes operator is A = -Laplace/2; its eigenvalue on mode k is
// a_k = |k|^2 / 2. The first eigenvalue of -Laplace is lambda1 = 2 a_min
// (= 1 on this lattice).
class SpectralGrid {
 public:
  explicit SpectralGrid(int n_max);

  int n_max() const { return n_max_; }
  int dealias_cutoff() const { return dealias_cutoff_; }
  double period() const { return period_; }

  int canonical_count() const { return static_cast<int>(modes_.size()); }
  const Mode& mode(int m) const { return modes_[m]; }
  const std::vector<Mode>& modes() const { return modes_; }

  /// Canonical index holding mode k (either k itself or its conjugate);
  /// -1 when k is outside the lattice or zero.
  int canonical_index(int k1, int k2) const;
  /// True when (k1, k2) is stored directly (not via conjugation).
  static bool is_canonical(int k1, int k2) {
    return k2 > 0 || (k2 == 0 && k1 > 0);
  }

  double k_norm_sq(int m) const { return k_sq_[m]; }
  /// Stokes eigenvalue a_k = |k|^2 / 2.
  double a(int m) const { return 0.5 * k_sq_[m]; }
  double a_min() const { return 0.5; }
  double a_max() const { return 0.5 * static_cast<double>(2 * n_max_ * n_max_); }
  /// First eigenvalue of -Laplace on the mean-zero lattice.
  double lambda1() const { return 2.0 * a_min(); }

  /// Unit divergence-free direction (-k2, k1)/|k| of the canonical mode.
  void tangent(int m, double& e1, double& e2) const;

  bool operator==(const SpectralGrid& other) const {
    return n_max_ == other.n_max_;
  }
  bool operator!=(const SpectralGrid& other) const { return !(*this == other); }

 private:
  int n_max_;
  int dealias_cutoff_;
  double period_;
  std::vector<Mode> modes_;
  std::vector<double> k_sq_;
  std::vector<int> lookup_;  // (2n+1)^2 flat table -> canonical index or -1

  int flat(int k1, int k2) const {
    return (k2 + n_max_) * (2 * n_max_ + 1) + (k1 + n_max_);
  }
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int n_max);

}  // namespace detfun

#endif
