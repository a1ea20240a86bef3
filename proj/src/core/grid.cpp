// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/grid.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace detfun {

SpectralGrid::SpectralGrid(int n_max)
    : n_max_(n_max),
      dealias_cutoff_(2 * n_max / 3),
      period_(2.0 * M_PI) {
  if (n_max < 2) throw ConfigError("SpectralGrid: n_max must be >= 2");
  const int side = 2 * n_max_ + 1;
  lookup_.assign(static_cast<std::size_t>(side) * side, -1);
  // k2 = 0 row first, then increasing k2; deterministic canonical order.
  for (int k1 = 1; k1 <= n_max_; ++k1) {
    lookup_[flat(k1, 0)] = canonical_count();
    lookup_[flat(-k1, 0)] = canonical_count();
    modes_.push_back({k1, 0});
    k_sq_.push_back(static_cast<double>(k1) * k1);
  }
  for (int k2 = 1; k2 <= n_max_; ++k2) {
    for (int k1 = -n_max_; k1 <= n_max_; ++k1) {
      lookup_[flat(k1, k2)] = canonical_count();
      lookup_[flat(-k1, -k2)] = canonical_count();
      modes_.push_back({k1, k2});
      k_sq_.push_back(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
    }
  }
}

int SpectralGrid::canonical_index(int k1, int k2) const {
  if (k1 == 0 && k2 == 0) return -1;
  if (std::abs(k1) > n_max_ || std::abs(k2) > n_max_) return -1;
  return lookup_[flat(k1, k2)];
}

void SpectralGrid::tangent(int m, double& e1, double& e2) const {
  const Mode& k = modes_[m];
  const double norm = std::sqrt(k_sq_[m]);
  e1 = -static_cast<double>(k.k2) / norm;
  e2 = static_cast<double>(k.k1) / norm;
}

GridPtr make_grid(int n_max) { return std::make_shared<SpectralGrid>(n_max); }

}  // namespace detfun
