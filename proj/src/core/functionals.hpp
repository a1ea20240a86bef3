// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_FUNCTIONALS_HPP
#define DETFUN_CORE_FUNCTIONALS_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "core/field.hpp"

namespace detfun {

// Divergence-free fields form a real vector space with one cos/sin pair
// per canonical mode; these helpers map between fields and coordinate
// vectors in that orthonormal H-basis (column 2m = cos, 2m+1 = sin).
Eigen::VectorXd field_to_vector(const SpectralField& u);
SpectralField field_from_vector(GridPtr grid, const Eigen::VectorXd& c);

// Norm scaling of a D(A^{s/2})-type space: squared norm contribution of
// a unit-H-mass mode with Stokes eigenvalue a is scale * a^exponent.
struct SpaceSpec {
  enum class Kind { V, H, W, Vdual, custom };
  Kind kind = Kind::custom;
  double exponent = 0;
  double scale = 1;

  double weight(double a) const;

  static SpaceSpec V();             // ||.||_V^2 = 2 ||A^{1/2}.||^2
  static SpaceSpec H();             // ||.||_H^2
  static SpaceSpec W(double s);     // ||A^{-s/2}.||^2
  static SpaceSpec Vdual();         // (1/2) ||A^{-1/2}.||^2
  static SpaceSpec parse(const std::string& name, double w_s = 1.0);
};

// Ordered pair (X, Y) with X continuously embedded in Y, i.e. the X-norm
// dominates mode-wise (x exponent > y exponent).
struct SpacePair {
  SpaceSpec x, y;
  SpacePair(SpaceSpec x_, SpaceSpec y_);
  static SpacePair VH() { return {SpaceSpec::V(), SpaceSpec::H()}; }
  static SpacePair HW(double s = 1.0) { return {SpaceSpec::H(), SpaceSpec::W(s)}; }
};

enum class FunctionalKind { modes, volume_averages, explicit_matrix };

// Finite family of linear functionals on V. Mode families and volume
// averages are grid-independent descriptors whose evaluation matrix is
// built (and cached) per target grid; explicit matrices are bound to the
// grid they were given for.
//
// Mode functionals are H-inner products against the orthonormal cos/sin
// basis fields of every canonical mode with |k|^2 <= cutoff. Volume
// averages are normalized disk indicators evaluated through their
// analytic Fourier transform (2 J1(|k| r) / (|k| r)); one functional per
// velocity component per center.
class FunctionalSet {
 public:
  static FunctionalSet modes(int cutoff_k_sq);
  static FunctionalSet volume_averages(std::vector<std::array<double, 2>> centers,
                                       double radius);
  static FunctionalSet explicit_matrix(GridPtr grid, Eigen::MatrixXd rows,
                                       std::vector<std::string> labels);

  FunctionalKind kind() const { return kind_; }
  int size() const;
  const std::vector<std::string>& labels() const { return labels_; }
  int mode_cutoff_k_sq() const { return cutoff_k_sq_; }

  /// Rows x (2 * canonical count of g): functional values on the real basis.
  const Eigen::MatrixXd& evaluation_matrix(const SpectralGrid& g) const;

  Eigen::VectorXd evaluate(const SpectralField& u) const;
  /// max_j |l_j(u)|^2 (eta_L without forming the vector).
  double eta(const SpectralField& u) const;

 private:
  FunctionalSet() = default;
  Eigen::MatrixXd build_matrix(const SpectralGrid& g) const;

  FunctionalKind kind_ = FunctionalKind::modes;
  int cutoff_k_sq_ = 0;
  std::vector<std::array<double, 2>> centers_;
  double radius_ = 0;
  GridPtr bound_grid_;        // explicit_matrix only
  Eigen::MatrixXd explicit_;  // explicit_matrix only
  std::vector<std::string> labels_;

  mutable std::mutex cache_mu_;
  mutable std::map<int, std::shared_ptr<const Eigen::MatrixXd>> cache_;

 public:
  FunctionalSet(const FunctionalSet& o);
  FunctionalSet& operator=(const FunctionalSet&) = delete;
  FunctionalSet(FunctionalSet&& o) noexcept;
};

struct DefectReport {
  double eps = 0;           // completeness defect eps_L(X, Y)
  double c_l = 0;           // certified constant of inequality (2)
  double c_l_sampled = 0;   // sampled lower audit of the optimal constant
  int truncation_n_max = 0;
  std::shared_ptr<SpectralField> maximizer;  // unit-X field attaining eps
};

/// Largest ||w||_Y / ||w||_X over the null space of the family within the
/// truncation (generalized Rayleigh problem restricted to null(L)).
/// Rejects rank-deficient families naming the near-dependent rows.
DefectReport completeness_defect(const FunctionalSet& L, const SpacePair& pair,
                                 GridPtr truncation);

/// Certified constant C such that ||u||_Y <= eps ||u||_X + C max_j |l_j(u)|
/// for every u in the truncation.
double defect_constant(const FunctionalSet& L, double eps, const SpacePair& pair,
                       GridPtr truncation);

struct SampledConstant {
  double value = 0;
  std::shared_ptr<SpectralField> achiever;
};
/// Sampling + local-refinement maximization of
/// (||u||_Y - eps ||u||_X) / max_j |l_j(u)|; a lower audit of the optimum.
SampledConstant defect_constant_sampled(const FunctionalSet& L, double eps,
                                        const SpacePair& pair, GridPtr truncation,
                                        int n_samples, std::uint64_t seed);

/// Closed-form defect of mode families from the first excluded eigenvalue;
/// pairs (V,H) and (H,W) only.
double modes_defect_analytic(int cutoff_k_sq, const SpacePair& pair);

/// Smallest |k|^2 on the nonzero integer lattice exceeding the cutoff.
int first_excluded_k_sq(int cutoff_k_sq);

}  // namespace detfun

#endif
