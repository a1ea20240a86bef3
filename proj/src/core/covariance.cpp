// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/covariance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace detfun {

CovarianceSpec::CovarianceSpec(GridPtr grid, std::vector<double> q,
                               std::string descriptor, double decay_p)
    : grid_(std::move(grid)),
      q_(std::move(q)),
      descriptor_(std::move(descriptor)),
      decay_p_(decay_p) {
  for (double v : q_)
    if (!(v >= 0)) throw ConfigError("CovarianceSpec: negative per-mode variance");
}

CovarianceSpec CovarianceSpec::zero(GridPtr grid) {
  const int n = grid->canonical_count();
  return CovarianceSpec(std::move(grid), std::vector<double>(n, 0.0), "zero",
                        std::numeric_limits<double>::infinity());
}

CovarianceSpec CovarianceSpec::power_law(GridPtr grid, double sigma2, double p) {
  if (sigma2 < 0) throw ConfigError("CovarianceSpec::power_law: sigma2 must be >= 0");
  if (!(p > 1.0))
    throw ConfigError(
        "CovarianceSpec::power_law: decay exponent p must exceed 1 "
        "(tr_H Q diverges on the infinite lattice otherwise)");
  std::vector<double> q(static_cast<std::size_t>(grid->canonical_count()));
  for (int m = 0; m < grid->canonical_count(); ++m)
    q[m] = sigma2 * std::pow(grid->k_norm_sq(m), -p);
  std::ostringstream d;
  d << "power_law sigma2=" << sigma2 << " p=" << p;
  return CovarianceSpec(std::move(grid), std::move(q), d.str(),
                        sigma2 == 0 ? std::numeric_limits<double>::infinity() : p);
}

CovarianceSpec CovarianceSpec::single_mode(GridPtr grid, Mode k, double q_val) {
  if (q_val < 0) throw ConfigError("CovarianceSpec::single_mode: q must be >= 0");
  const int m = grid->canonical_index(k.k1, k.k2);
  if (m < 0) throw ConfigError("CovarianceSpec::single_mode: mode outside the lattice");
  std::vector<double> q(static_cast<std::size_t>(grid->canonical_count()), 0.0);
  q[m] = q_val;
  std::ostringstream d;
  d << "single_mode k=(" << k.k1 << "," << k.k2 << ") q=" << q_val;
  return CovarianceSpec(std::move(grid), std::move(q), d.str(),
                        std::numeric_limits<double>::infinity());
}

CovarianceSpec CovarianceSpec::from_values(GridPtr grid, std::vector<double> q,
                                           std::string descriptor) {
  if (static_cast<int>(q.size()) != grid->canonical_count())
    throw ConfigError("CovarianceSpec::from_values: size mismatch");
  return CovarianceSpec(std::move(grid), std::move(q), std::move(descriptor),
                        std::numeric_limits<double>::infinity());
}

double CovarianceSpec::trace() const {
  double acc = 0;
  for (double v : q_) acc += v;
  return acc;
}

double CovarianceSpec::trace_a2() const { return trace_a_pow(2.0); }

double CovarianceSpec::trace_a_pow(double e) const {
  double acc = 0;
  for (int m = 0; m < grid_->canonical_count(); ++m)
    acc += q_[m] * std::pow(grid_->a(m), e);
  return acc;
}

bool CovarianceSpec::is_zero() const {
  for (double v : q_)
    if (v != 0) return false;
  return true;
}

}  // namespace detfun
