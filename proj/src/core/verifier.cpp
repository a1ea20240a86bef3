// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/thread_pool.hpp"

namespace detfun {

namespace {

double trapezoid(const std::vector<double>& f, int i0, int i1, double dt) {
  double acc = 0;
  for (int i = i0; i < i1; ++i) acc += 0.5 * (f[i] + f[i + 1]) * dt;
  return acc;
}

}  // namespace

PairTrace run_pair(const SpectralField& x1, const SpectralField& x2,
                   const NoisePath& path, const FunctionalSet& L, const NSEParams& p,
                   const GronwallParams& gp, double horizon, double dt) {
  if (!(horizon >= 2.0)) throw ConfigError("run_pair: horizon must be >= 2");
  require_same_grid(x1, x2, "run_pair");
  const int i0 = path.index_at(0.0);
  const int i1 = path.index_at(horizon);

  PairTrace trace;
  trace.seed = path.seed();
  trace.dt = dt;
  const int n_nodes = i1 - i0 + 1;
  trace.t.reserve(n_nodes);
  trace.w_h.reserve(n_nodes);

  TransformedStepper step1(p, dt), step2(p, dt);
  SpectralField u1 = x1, u2 = x2;

  const double floor = gp.decay_floor();
  auto record = [&](int node, const SpectralField& a, const SpectralField& b,
                    const SpectralField& z) {
    const double t = path.time(i0 + node);
    trace.t.push_back(t);
    SpectralField w = a;
    w -= b;
    const NormBundle nw = norms(w);
    trace.w_h.push_back(nw.h);
    trace.w_v.push_back(nw.v);
    trace.eta.push_back(L.eta(w));
    const double l = lipschitz_l(a, z, p.nu);
    trace.l_val.push_back(l);
    trace.q.push_back(2.0 * l - floor);
    const NormBundle na = norms(a);
    trace.u1_h.push_back(na.h);
    trace.u1_v.push_back(na.v);
    const double rel = std::abs(t - std::round(t));
    if (rel < 0.5 * dt) {
      trace.unit_nodes.push_back(node);
      trace.u1_units.push_back(a);
      trace.u2_units.push_back(b);
    }
  };

  record(0, u1, u2, path.z(i0));
  bool aborted = false;
  for (int i = i0; i < i1 && !aborted; ++i) {
    const SpectralField& z = path.z(i);
    SpectralField n1 = step1.step(u1, z);
    SpectralField n2 = step2.step(u2, z);
    auto finite = [](const SpectralField& f) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        const Complex c = f.data()[j];
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
      }
      return true;
    };
    if (!finite(n1) || !finite(n2)) {
      trace.flags1.aborted = !finite(n1);
      trace.flags2.aborted = !finite(n2);
      trace.flags1.last_valid_time = path.time(i);
      trace.flags2.last_valid_time = path.time(i);
      aborted = true;
      break;
    }
    u1 = std::move(n1);
    u2 = std::move(n2);
    record(i - i0 + 1, u1, u2, path.z(i + 1));
  }
  trace.complete = !aborted;

  // unit-window trapezoid integrals
  const int steps_per_unit = static_cast<int>(std::lround(1.0 / dt));
  const int full_units =
      static_cast<int>(trace.t.size() - 1) / std::max(steps_per_unit, 1);
  for (int j = 0; j < full_units; ++j) {
    const int a = j * steps_per_unit;
    const int b = (j + 1) * steps_per_unit;
    trace.window_eta.push_back(trapezoid(trace.eta, a, b, dt));
    trace.window_l.push_back(trapezoid(trace.l_val, a, b, dt));
  }
  return trace;
}

GronwallAudit check_gronwall(const PairTrace& trace, const GronwallParams& gp) {
  GronwallAudit audit;
  const std::size_t n = trace.t.size();
  if (n == 0) return audit;
  const double w0_sq = trace.w_h[0] * trace.w_h[0];
  const double k_const = gp.integral_constant();
  audit.bound.resize(n);
  audit.bound[0] = w0_sq;
  audit.min_slack = 0.0;

  // Recursive trapezoid evaluation of both terms:
  //   E_i = exp(trapz q over [t_i, t_i+1]), decay_i+1 = decay_i * E_i,
  //   S_i+1 = E_i S_i + dt/2 (E_i eta_i + eta_i+1).
  double decay = 1.0;
  double s = 0.0;
  bool first = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = trace.t[i + 1] - trace.t[i];
    const double e = std::exp(0.5 * (trace.q[i] + trace.q[i + 1]) * dt);
    decay *= e;
    s = e * s + 0.5 * dt * (e * trace.eta[i] + trace.eta[i + 1]);
    const double rhs = w0_sq * decay + k_const * s;
    audit.bound[i + 1] = rhs;
    const double lhs = trace.w_h[i + 1] * trace.w_h[i + 1];
    const double slack = rhs - lhs;
    if (first || slack < audit.min_slack) {
      audit.min_slack = slack;
      first = false;
    }
    // tolerance absorbs pure roundoff of the comparison itself
    if (lhs > rhs * (1.0 + 1e-12)) {
      if (audit.violations == 0) audit.first_violation_time = trace.t[i + 1];
      ++audit.violations;
      audit.max_excess = std::max(audit.max_excess, lhs - rhs);
    }
  }
  return audit;
}

ExceedanceReport convergence_in_probability(const std::vector<PairTrace>& traces,
                                            double level_rel, double target_fraction,
                                            int node_stride) {
  if (traces.empty()) throw ConfigError("convergence_in_probability: empty ensemble");
  if (node_stride < 1) node_stride = 1;
  ExceedanceReport rep;
  rep.level_rel = level_rel;
  rep.target_fraction = target_fraction;
  const std::size_t n_nodes = traces.front().t.size();
  for (const auto& tr : traces)
    if (tr.t.size() != n_nodes)
      throw ConfigError("convergence_in_probability: traces on different grids");
  for (std::size_t i = 0; i < n_nodes; i += static_cast<std::size_t>(node_stride)) {
    int exceed = 0;
    for (const auto& tr : traces) {
      const double level = level_rel * tr.w_h[0];
      if (tr.w_h[i] > level) ++exceed;
    }
    const double frac = static_cast<double>(exceed) / traces.size();
    rep.times.push_back(traces.front().t[i]);
    rep.fraction.push_back(frac);
    if (!rep.synchronized && frac <= target_fraction) {
      rep.synchronized = true;
      rep.sync_time = traces.front().t[i];
    }
  }
  rep.final_fraction = rep.fraction.back();
  return rep;
}

Condition4Report empirical_condition4(const NSEParams& p, const CovarianceSpec& Q,
                                      double eps_L, const Condition4Options& opts) {
  if (opts.n_paths < 16)
    throw ConfigError("empirical_condition4: at least 16 noise paths required");
  if (opts.n_ics < 4)
    throw ConfigError("empirical_condition4: at least 4 initial conditions required");
  if (!(eps_L > 0)) throw ConfigError("empirical_condition4: eps_L must be > 0");

  RealizationSpec rspec;
  rspec.t_end = opts.m_window;
  rspec.dt = opts.dt;
  rspec.t_burn = opts.t_burn;
  rspec.burn_dt = opts.burn_dt;
  rspec.eps_margin = opts.eps_margin;

  std::vector<double> sup_vals(static_cast<std::size_t>(opts.n_paths), 0.0);
  parallel_for(opts.n_paths, opts.workers, [&](int i) {
    const std::uint64_t seed = opts.base_seed + static_cast<std::uint64_t>(i);
    const Realization real = make_realization(p, Q, rspec, seed);
    double sup = 0;
    for (int ic = 0; ic < opts.n_ics; ++ic) {
      const SpectralField x0 = sample_on_sphere(p.forcing.grid_ptr(), real.r0, seed,
                                                static_cast<std::uint64_t>(ic));
      std::vector<double> l_nodes;
      IntegrateOptions iopts;
      iopts.observer = [&](int, double t, const SpectralField& u) {
        const int zi = real.forward.index_at(t);
        l_nodes.push_back(lipschitz_l(u, real.forward.z(zi), p.nu));
      };
      const Trajectory traj = integrate_transformed(x0, real.forward, p, opts.m_window,
                                                    opts.dt, 0.0, iopts);
      if (traj.flags().aborted)
        throw NumericError("empirical_condition4: trajectory aborted");
      sup = std::max(sup, trapezoid(l_nodes, 0, static_cast<int>(l_nodes.size()) - 1,
                                    opts.dt));
    }
    sup_vals[static_cast<std::size_t>(i)] = sup;
  });

  Condition4Report rep;
  rep.n_paths = opts.n_paths;
  rep.n_ics = opts.n_ics;
  double acc = 0;
  for (double v : sup_vals) acc += v;
  rep.lhs = acc / opts.n_paths / opts.m_window;
  const double c = 0.5 * p.nu;
  rep.threshold = c / (eps_L * eps_L);
  rep.margin = rep.threshold - rep.lhs;
  rep.pass = rep.margin > 0;
  rep.implied_EQ =
      2.0 * rep.lhs - 2.0 * c / ((1.0 + opts.delta) * eps_L * eps_L);
  return rep;
}

ErgodicLedger build_ergodic_ledger(const std::vector<std::vector<double>>& window_l,
                                   const GronwallParams& gp) {
  if (window_l.empty()) throw ConfigError("build_ergodic_ledger: empty ensemble");
  const std::size_t n_windows = window_l.front().size();
  for (const auto& row : window_l)
    if (row.size() != n_windows)
      throw ConfigError("build_ergodic_ledger: ragged window matrix");
  ErgodicLedger ledger;
  ledger.delta = gp.delta;
  const double floor = gp.decay_floor();
  double running = 0;
  for (std::size_t j = 0; j < n_windows; ++j) {
    double sup = 0;
    for (const auto& row : window_l) sup = std::max(sup, row[j]);
    const double qj = 2.0 * sup - floor;
    ledger.increments.push_back(qj);
    running += qj;
    ledger.partial_sums.push_back(running);
  }
  ledger.mean = running / static_cast<double>(n_windows);
  // least-squares slope of partial sums against the window index (1-based)
  const double n = static_cast<double>(n_windows);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < n_windows; ++j) {
    const double x = static_cast<double>(j + 1);
    sx += x;
    sy += ledger.partial_sums[j];
    sxx += x * x;
    sxy += x * ledger.partial_sums[j];
  }
  const double denom = n * sxx - sx * sx;
  ledger.sum_slope = denom > 0 ? (n * sxy - sx * sy) / denom : 0.0;
  return ledger;
}

double projector_norm(const SpectralField& u, int cutoff_k_sq) {
  const SpectralGrid& g = u.grid();
  double acc = 0;
  for (int m = 0; m < g.canonical_count(); ++m) {
    if (g.k_norm_sq(m) > cutoff_k_sq) continue;
    acc += std::norm(u.amplitude(m));
  }
  return std::sqrt(2.0 * acc);
}

SqueezeReport squeeze_estimate(const std::vector<PairTrace>& traces, int p_cutoff_k_sq,
                               double eps_hw) {
  SqueezeReport rep;
  rep.p_cutoff_k_sq = p_cutoff_k_sq;
  rep.eps_hw = eps_hw;
  rep.a0 = std::sqrt(0.5 * first_excluded_k_sq(p_cutoff_k_sq));
  for (const auto& tr : traces) {
    const std::size_t units = tr.unit_nodes.size();
    for (std::size_t j = 0; j + 1 < units; ++j) {
      SpectralField w_next = tr.u1_units[j + 1];
      w_next -= tr.u2_units[j + 1];
      SpectralField w_prev = tr.u1_units[j];
      w_prev -= tr.u2_units[j];
      const double d_prev = norm_h(w_prev);
      const double d_next = norm_h(w_next);
      const double p_part = projector_norm(w_next, p_cutoff_k_sq);
      const double q_part = std::sqrt(std::max(d_next * d_next - p_part * p_part, 0.0));
      ++rep.steps_total;
      rep.n_values.push_back(2.0 * p_part);
      if (q_part <= p_part) {
        ++rep.projection_branch;  // ties land here
      } else {
        ++rep.contraction_branch;
        if (d_prev > 0) rep.r_samples.push_back(std::log(d_next / d_prev));
      }
      // Lipschitz ratio over the unit interval
      if (d_prev > 0) {
        const int a = tr.unit_nodes[j];
        const int b = tr.unit_nodes[j + 1];
        double m = 0;
        for (int i = a; i <= b; ++i) m = std::max(m, tr.w_h[i] / d_prev);
        rep.m_samples.push_back(m);
      }
    }
  }
  if (!rep.r_samples.empty())
    rep.mean_r = std::accumulate(rep.r_samples.begin(), rep.r_samples.end(), 0.0) /
                 static_cast<double>(rep.r_samples.size());
  rep.threshold_ok = 2.0 * rep.a0 * rep.eps_hw < 1.0;
  if (rep.threshold_ok) {
    rep.combined = rep.mean_r + std::log(1.0 / (1.0 - 2.0 * rep.a0 * rep.eps_hw));
    rep.combined_ok = rep.combined < 0.0;
  }
  return rep;
}

IterationBoundRoutes iteration_bound_routes(double d0, const std::vector<double>& n_seq,
                                       const std::vector<double>& r_integrals) {
  if (n_seq.size() != r_integrals.size())
    throw ConfigError("iteration_bound_routes: sequence lengths differ");
  IterationBoundRoutes out;
  const std::size_t m_max = n_seq.size();
  out.recursion.reserve(m_max);
  double d = d0;
  for (std::size_t m = 0; m < m_max; ++m) {
    d = n_seq[m] + std::exp(r_integrals[m]) * d;
    out.recursion.push_back(d);
  }
  out.closed_form.reserve(m_max);
  for (std::size_t m = 1; m <= m_max; ++m) {
    double r_total = 0;
    for (std::size_t i = 0; i < m; ++i) r_total += r_integrals[i];
    double val = d0 * std::exp(r_total);
    for (std::size_t j = 0; j < m; ++j) {
      // term N(m - j) e^{int_{m-j}^m r}
      double tail = 0;
      for (std::size_t i = m - j; i < m; ++i) tail += r_integrals[i];
      val += n_seq[m - j - 1] * std::exp(tail);
    }
    out.closed_form.push_back(val);
  }
  return out;
}

SpectralField conjugated_difference(const SpectralField& u1, const SpectralField& u2,
                                    const SpectralField& z) {
  require_same_grid(u1, z, "conjugated_difference");
  // (u1 + z) - (u2 + z): the shared shift cancels before any arithmetic
  SpectralField d = u1;
  d -= u2;
  return d;
}

ConjugacyReport conjugacy_transfer(const PairTrace& trace, const NoisePath& path,
                                   const FunctionalSet& L) {
  ConjugacyReport rep;
  bool eta_all = true;
  for (std::size_t j = 0; j < trace.unit_nodes.size(); ++j) {
    const double t = trace.t[trace.unit_nodes[j]];
    const SpectralField& z = path.z(path.index_at(t));
    const SpectralField& u1 = trace.u1_units[j];
    const SpectralField& u2 = trace.u2_units[j];

    SpectralField d_u = u1;
    d_u -= u2;
    const SpectralField d_v = conjugated_difference(u1, u2, z);
    for (std::size_t i = 0; i < d_u.size(); ++i)
      rep.identity_residual =
          std::max(rep.identity_residual, std::abs(d_v.data()[i] - d_u.data()[i]));

    SpectralField v1 = u1;
    v1 += z;
    SpectralField v2 = u2;
    v2 += z;
    SpectralField d_mat = v1;
    d_mat -= v2;
    for (std::size_t i = 0; i < d_u.size(); ++i)
      rep.materialized_residual =
          std::max(rep.materialized_residual, std::abs(d_mat.data()[i] - d_u.data()[i]));

    const Eigen::VectorXd ev = L.evaluate(d_v);
    const Eigen::VectorXd eu = L.evaluate(d_u);
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) != eu(i)) eta_all = false;
    ++rep.snapshots_checked;
  }
  rep.eta_match = eta_all;
  return rep;
}

double spearman_rho(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<double>(i + 1);
  double d_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rank[i] - static_cast<double>(i + 1);
    d_sq += d * d;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d_sq / (nn * (nn * nn - 1.0));
}

}  // namespace detfun
