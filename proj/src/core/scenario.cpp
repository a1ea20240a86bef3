// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/toml.hpp"

namespace detfun {

namespace {

std::vector<Mode> parse_modes(const std::vector<std::vector<double>>& rows,
                              const std::string& where) {
  std::vector<Mode> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != 2) throw ConfigError(where + ": each mode needs two components");
    const double k1 = r[0], k2 = r[1];
    if (k1 != std::floor(k1) || k2 != std::floor(k2))
      throw ConfigError(where + ": wavevector components must be integers");
    out.push_back({static_cast<int>(k1), static_cast<int>(k2)});
  }
  return out;
}

std::vector<Complex> parse_amps(const toml::Table& t, const std::string& section,
                                const std::string& re_key, const std::string& im_key,
                                std::size_t count) {
  std::vector<double> re(count, 0.0), im(count, 0.0);
  if (t.has(section, re_key)) re = t.get_double_array(section, re_key);
  if (t.has(section, im_key)) im = t.get_double_array(section, im_key);
  if (re.size() != count || im.size() != count)
    throw ConfigError("[" + section + "] amplitude arrays must match the mode list");
  std::vector<Complex> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

}  // namespace

Scenario Scenario::parse(const std::string& toml_text) {
  const toml::Table t = toml::parse(toml_text);
  Scenario s;
  s.source_text = toml_text;

  s.nu = t.get_double("model", "nu");
  if (!(s.nu > 0)) throw ConfigError("[model] nu must be > 0");
  s.kappa = t.get_double_or("model", "kappa", 0.0);
  if (s.kappa < 0) throw ConfigError("[model] kappa must be >= 0");
  s.n_max = static_cast<int>(t.get_int("model", "n_max"));
  if (s.n_max < 2) throw ConfigError("[model] n_max must be >= 2");
  if (t.has("model", "forcing_modes")) {
    s.forcing_modes =
        parse_modes(t.get_array_of_arrays("model", "forcing_modes"), "[model] forcing_modes");
    s.forcing_amps = parse_amps(t, "model", "forcing_amps_re", "forcing_amps_im",
                                s.forcing_modes.size());
  }

  if (!t.has_section("noise")) throw ConfigError("missing required section [noise]");
  s.noise_kind = t.get_string_or("noise", "kind", "power_law");
  if (s.noise_kind != "power_law" && s.noise_kind != "single_mode" && s.noise_kind != "zero")
    throw ConfigError("[noise] kind must be power_law, single_mode or zero");
  if (s.noise_kind == "power_law") {
    s.sigma2 = t.get_double("noise", "sigma2");
    s.decay_p = t.get_double("noise", "decay_p");
  } else if (s.noise_kind == "single_mode") {
    const auto rows = t.get_array_of_arrays("noise", "mode");
    const auto modes = parse_modes(rows, "[noise] mode");
    if (modes.size() != 1) throw ConfigError("[noise] mode must hold one wavevector");
    s.noise_mode = {modes[0].k1, modes[0].k2};
    s.noise_q = t.get_double("noise", "q");
  }
  if (t.has("noise", "kappa")) {
    const double nk = t.get_double("noise", "kappa");
    if (t.has("model", "kappa") && nk != s.kappa)
      throw ConfigError("[noise] kappa conflicts with [model] kappa");
    s.kappa = nk;
    if (s.kappa < 0) throw ConfigError("[noise] kappa must be >= 0");
  }
  if (!t.has("noise", "seed"))
    throw ConfigError("missing required field [noise] seed (seeds must be explicit)");
  const std::int64_t seed = t.get_int("noise", "seed");
  if (seed < 0) throw ConfigError("[noise] seed must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);

  s.functional_kind = t.get_string_or("functionals", "kind", "modes");
  if (s.functional_kind != "modes" && s.functional_kind != "volume_averages")
    throw ConfigError("[functionals] kind must be modes or volume_averages");
  s.mode_cutoff = static_cast<int>(t.get_int_or("functionals", "mode_cutoff", 1));
  if (t.has("functionals", "centers")) {
    for (const auto& row : t.get_array_of_arrays("functionals", "centers")) {
      if (row.size() != 2) throw ConfigError("[functionals] centers entries need x,y");
      s.centers.push_back({row[0], row[1]});
    }
  }
  s.avg_radius = t.get_double_or("functionals", "radius", 0.5);
  s.pair_x = t.get_string_or("functionals", "pair_x", "V");
  s.pair_y = t.get_string_or("functionals", "pair_y", "H");
  s.w_exponent = t.get_double_or("functionals", "w_exponent", 1.0);
  s.truncation_factor = static_cast<int>(t.get_int_or("functionals", "truncation_factor", 2));
  if (s.truncation_factor < 1)
    throw ConfigError("[functionals] truncation_factor must be >= 1");

  s.t_end = t.get_double_or("run", "t_end", 1.0);
  if (!(s.t_end > 0)) throw ConfigError("[run] t_end must be > 0");
  s.dt = t.get_double_or("run", "dt", 1e-3);
  if (!(s.dt > 0)) throw ConfigError("[run] dt must be > 0");
  s.t_burn = t.get_double_or("run", "t_burn", 0.0);
  s.burn_dt = t.get_double_or("run", "burn_dt", 0.01);
  s.eps_margin = t.get_double_or("run", "eps_margin", 0.1);
  if (!(s.eps_margin > 0)) throw ConfigError("[run] eps_margin must be > 0");
  s.m_window = t.get_double_or("run", "m_window", 1.0);
  s.delta = t.get_double_or("run", "delta", 0.1);
  s.delta_level = t.get_double_or("run", "delta_level", 1e-3);
  s.target_fraction = t.get_double_or("run", "target_fraction", 0.05);
  s.n_pairs = static_cast<int>(t.get_int_or("run", "n_pairs", 8));
  s.ic_samples = static_cast<int>(t.get_int_or("run", "ic_samples", 4));
  s.snapshot_stride = static_cast<int>(t.get_int_or("run", "snapshot_stride", 0));
  s.ic_kind = t.get_string_or("run", "ic_kind", "sphere");
  if (s.ic_kind != "sphere" && s.ic_kind != "modes" && s.ic_kind != "zero")
    throw ConfigError("[run] ic_kind must be sphere, modes or zero");
  s.ic_radius_factor = t.get_double_or("run", "ic_radius_factor", 1.0);
  if (t.has("run", "ic_modes")) {
    s.ic_modes = parse_modes(t.get_array_of_arrays("run", "ic_modes"), "[run] ic_modes");
    s.ic_amps = parse_amps(t, "run", "ic_amps_re", "ic_amps_im", s.ic_modes.size());
  }
  if (s.ic_kind == "modes" && s.ic_modes.empty())
    throw ConfigError("[run] ic_kind = modes requires ic_modes");

  s.a0 = t.get_double_or("conditions", "a0", 1.0);
  s.a1 = t.get_double_or("conditions", "a1", 1.0);
  if (t.has("conditions", "c_e")) s.c_e_override = t.get_double("conditions", "c_e");

  if (t.has_section("sweep") && t.has("sweep", "parameter")) {
    s.sweep_parameter = t.get_string("sweep", "parameter");
    if (s.sweep_parameter != "kappa" && s.sweep_parameter != "sigma2" &&
        s.sweep_parameter != "mode_cutoff")
      throw ConfigError("[sweep] parameter must be kappa, sigma2 or mode_cutoff");
    s.sweep_values = t.get_double_array("sweep", "values");
    if (s.sweep_values.empty()) throw ConfigError("[sweep] values must be nonempty");
  }

  s.out_dir = t.get_string_or("output", "dir", "out");
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

GridPtr Scenario::make_grid_ptr() const { return make_grid(n_max); }

CovarianceSpec Scenario::make_covariance(GridPtr grid) const {
  if (noise_kind == "zero" || (noise_kind == "power_law" && sigma2 == 0.0))
    return CovarianceSpec::zero(std::move(grid));
  if (noise_kind == "single_mode")
    return CovarianceSpec::single_mode(std::move(grid), {noise_mode[0], noise_mode[1]},
                                       noise_q);
  return CovarianceSpec::power_law(std::move(grid), sigma2, decay_p);
}

SpectralField Scenario::make_forcing(GridPtr grid) const {
  SpectralField f = SpectralField::zero(grid);
  for (std::size_t i = 0; i < forcing_modes.size(); ++i)
    f += SpectralField::single_mode(grid, forcing_modes[i], forcing_amps[i]);
  return f;
}

NSEParams Scenario::make_params(GridPtr grid) const {
  return NSEParams(nu, kappa, make_forcing(std::move(grid)));
}

FunctionalSet Scenario::make_functionals() const {
  if (functional_kind == "volume_averages") {
    if (centers.empty())
      throw ConfigError("[functionals] volume_averages requires centers");
    return FunctionalSet::volume_averages(centers, avg_radius);
  }
  return FunctionalSet::modes(mode_cutoff);
}

SpacePair Scenario::make_pair() const {
  return SpacePair(SpaceSpec::parse(pair_x, w_exponent),
                   SpaceSpec::parse(pair_y, w_exponent));
}

GridPtr Scenario::make_truncation_grid() const {
  return make_grid(n_max * truncation_factor);
}

double Scenario::effective_t_burn() const {
  return t_burn > 0 ? t_burn : 20.0 / nu;  // lambda1 = 1 on the torus
}

SpectralField Scenario::make_initial_condition(GridPtr grid, double sphere_radius,
                                               std::uint64_t ic_seed,
                                               std::uint64_t counter) const {
  if (ic_kind == "zero") return SpectralField::zero(std::move(grid));
  if (ic_kind == "modes") {
    SpectralField u = SpectralField::zero(grid);
    for (std::size_t i = 0; i < ic_modes.size(); ++i)
      u += SpectralField::single_mode(grid, ic_modes[i], ic_amps[i]);
    return u;
  }
  return sample_on_sphere(std::move(grid), ic_radius_factor * sphere_radius, ic_seed,
                          counter);
}

ModelConstants Scenario::make_constants(double eps_L) const {
  GridPtr grid = make_grid_ptr();
  const CovarianceSpec q = make_covariance(grid);
  const SpectralField f = make_forcing(grid);
  ModelConstants c;
  c.nu = nu;
  c.kappa = kappa;
  c.lambda1 = grid->lambda1();
  const NormBundle nf = norms(f);
  c.f_vdual_sq = nf.v_dual * nf.v_dual;
  c.trQ = q.trace();
  c.trQA2 = q.trace_a2();
  c.c_E = c_e_override ? *c_e_override : estimate_c_E(*grid);
  c.a0 = a0;
  c.a1 = a1;
  c.eps_L = eps_L;
  c.m_window = m_window;
  return c;
}

}  // namespace detfun
