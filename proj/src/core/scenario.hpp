// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_SCENARIO_HPP
#define DETFUN_CORE_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/conditions.hpp"
#include "core/covariance.hpp"
#include "core/dynamics.hpp"
#include "core/functionals.hpp"

namespace detfun {

// File-driven experiment description. All randomness is pinned by the
// explicit [noise] seed; reruns of the same scenario produce identical
// bytes. See README for the block reference.
struct Scenario {
  // [model]
  double nu = 1.0;
  double kappa = 0.0;
  int n_max = 4;
  std::vector<Mode> forcing_modes;
  std::vector<Complex> forcing_amps;

  // [noise]
  std::string noise_kind = "power_law";  // power_law | single_mode | zero
  double sigma2 = 0.0;
  double decay_p = 4.0;
  std::array<int, 2> noise_mode = {1, 0};
  double noise_q = 0.0;
  std::uint64_t seed = 0;

  // [functionals]
  std::string functional_kind = "modes";  // modes | volume_averages
  int mode_cutoff = 1;                    // |k|^2 <= cutoff
  std::vector<std::array<double, 2>> centers;
  double avg_radius = 0.5;
  std::string pair_x = "V";
  std::string pair_y = "H";
  double w_exponent = 1.0;
  int truncation_factor = 2;

  // [run]
  double t_end = 1.0;
  double dt = 1e-3;
  double t_burn = 0;  // 0: default 20/(nu lambda1)
  double burn_dt = 0.01;
  double eps_margin = 0.1;
  double m_window = 1.0;
  double delta = 0.1;
  double delta_level = 1e-3;      // exceedance threshold (relative to ||w(0)||)
  double target_fraction = 0.05;  // synchronization fraction
  int n_pairs = 8;
  int ic_samples = 4;
  int snapshot_stride = 0;
  std::string ic_kind = "sphere";  // sphere | modes | zero
  double ic_radius_factor = 1.0;
  std::vector<Mode> ic_modes;
  std::vector<Complex> ic_amps;

  // [conditions]
  double a0 = 1.0;
  double a1 = 1.0;
  std::optional<double> c_e_override;

  // [sweep]
  std::string sweep_parameter;  // kappa | sigma2 | mode_cutoff
  std::vector<double> sweep_values;

  // [output]
  std::string out_dir = "out";

  std::string source_text;  // raw scenario bytes (hashed into manifests)

  static Scenario parse(const std::string& toml_text);
  static Scenario load(const std::string& path);

  GridPtr make_grid_ptr() const;
  CovarianceSpec make_covariance(GridPtr grid) const;
  SpectralField make_forcing(GridPtr grid) const;
  NSEParams make_params(GridPtr grid) const;
  FunctionalSet make_functionals() const;
  SpacePair make_pair() const;
  GridPtr make_truncation_grid() const;
  SpectralField make_initial_condition(GridPtr grid, double sphere_radius,
                                       std::uint64_t ic_seed,
                                       std::uint64_t counter) const;
  double effective_t_burn() const;

  /// Model constants for the condition evaluator; eps_L must be supplied
  /// (computed by the defect machinery), c_E estimated unless overridden.
  ModelConstants make_constants(double eps_L) const;
};

}  // namespace detfun

#endif
