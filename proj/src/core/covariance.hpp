// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_COVARIANCE_HPP
#define DETFUN_CORE_COVARIANCE_HPP

#include <string>
#include <vector>

#include "core/field.hpp"

namespace detfun {

// Diagonal trace-class covariance of the Wiener process, one variance
// q_k per canonical mode pair acting in the divergence-free direction.
// q_k is the total H-mass rate of the pair, so tr_H Q = sum_canonical q_k
// and the complex coefficient of mode k carries variance q_k / 2.
class CovarianceSpec {
 public:
  static CovarianceSpec zero(GridPtr grid);
  /// q_k = sigma2 * |k|^(-2p). Requires p > 1 (infinite-lattice trace).
  static CovarianceSpec power_law(GridPtr grid, double sigma2, double p);
  static CovarianceSpec single_mode(GridPtr grid, Mode k, double q);
  static CovarianceSpec from_values(GridPtr grid, std::vector<double> q,
                                    std::string descriptor);

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double q(int m) const { return q_[m]; }

  /// tr_H Q
  double trace() const;
  /// tr_H (Q A^2)
  double trace_a2() const;
  /// tr_H (Q A^e) for real e
  double trace_a_pow(double e) const;

  /// Symbolic checks on the decay description (vacuously true for
  /// finitely supported families).
  bool infinite_lattice_trace_finite() const { return decay_p_ > 1.0; }
  bool infinite_lattice_trace_a2_finite() const { return decay_p_ > 3.0; }

  bool is_zero() const;
  const std::string& descriptor() const { return descriptor_; }

 private:
  CovarianceSpec(GridPtr grid, std::vector<double> q, std::string descriptor,
                 double decay_p);

  GridPtr grid_;
  std::vector<double> q_;
  std::string descriptor_;
  double decay_p_;  // +inf for finitely supported families
};

}  // namespace detfun

#endif
