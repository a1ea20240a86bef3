// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/functionals.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace detfun {

Eigen::VectorXd field_to_vector(const SpectralField& u) {
  const SpectralGrid& g = u.grid();
  Eigen::VectorXd c(2 * g.canonical_count());
  const double s2 = std::sqrt(2.0);
  for (int m = 0; m < g.canonical_count(); ++m) {
    const Complex psi = u.amplitude(m);
    c(2 * m) = s2 * psi.real();
    c(2 * m + 1) = -s2 * psi.imag();
  }
  return c;
}

SpectralField field_from_vector(GridPtr grid, const Eigen::VectorXd& c) {
  const int n = grid->canonical_count();
  if (c.size() != 2 * n)
    throw ConfigError("field_from_vector: coordinate size does not match the grid");
  std::vector<Complex> psi(static_cast<std::size_t>(n));
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < n; ++m)
    psi[m] = Complex(c(2 * m) * inv_s2, -c(2 * m + 1) * inv_s2);
  return SpectralField::from_amplitudes(std::move(grid), psi);
}

double SpaceSpec::weight(double a) const {
  return exponent == 0.0 ? scale : scale * std::pow(a, exponent);
}

SpaceSpec SpaceSpec::V() { return {Kind::V, 1.0, 2.0}; }
SpaceSpec SpaceSpec::H() { return {Kind::H, 0.0, 1.0}; }
SpaceSpec SpaceSpec::W(double s) {
  if (!(s > 0)) throw ConfigError("SpaceSpec::W: s must be > 0");
  return {Kind::W, -s, 1.0};
}
SpaceSpec SpaceSpec::Vdual() { return {Kind::Vdual, -1.0, 0.5}; }

SpaceSpec SpaceSpec::parse(const std::string& name, double w_s) {
  if (name == "V") return V();
  if (name == "H") return H();
  if (name == "W") return W(w_s);
  if (name == "Vdual" || name == "V'") return Vdual();
  throw ConfigError("SpaceSpec: unknown space name '" + name + "'");
}

SpacePair::SpacePair(SpaceSpec x_, SpaceSpec y_) : x(x_), y(y_) {
  if (!(x.exponent > y.exponent))
    throw ConfigError("SpacePair: X must embed into Y (x exponent > y exponent)");
}

FunctionalSet::FunctionalSet(const FunctionalSet& o)
    : kind_(o.kind_),
      cutoff_k_sq_(o.cutoff_k_sq_),
      centers_(o.centers_),
      radius_(o.radius_),
      bound_grid_(o.bound_grid_),
      explicit_(o.explicit_),
      labels_(o.labels_) {}

FunctionalSet::FunctionalSet(FunctionalSet&& o) noexcept
    : kind_(o.kind_),
      cutoff_k_sq_(o.cutoff_k_sq_),
      centers_(std::move(o.centers_)),
      radius_(o.radius_),
      bound_grid_(std::move(o.bound_grid_)),
      explicit_(std::move(o.explicit_)),
      labels_(std::move(o.labels_)) {}

FunctionalSet FunctionalSet::modes(int cutoff_k_sq) {
  if (cutoff_k_sq < 0) throw ConfigError("FunctionalSet::modes: cutoff must be >= 0");
  FunctionalSet f;
  f.kind_ = FunctionalKind::modes;
  f.cutoff_k_sq_ = cutoff_k_sq;
  // labels need a lattice walk; enumerate canonically like SpectralGrid
  const int kmax = static_cast<int>(std::sqrt(static_cast<double>(cutoff_k_sq))) + 1;
  auto add = [&](int k1, int k2) {
    if (k1 * k1 + k2 * k2 > cutoff_k_sq) return;
    std::ostringstream base;
    base << "mode(" << k1 << "," << k2 << ")";
    f.labels_.push_back(base.str() + ".cos");
    f.labels_.push_back(base.str() + ".sin");
  };
  for (int k1 = 1; k1 <= kmax; ++k1) add(k1, 0);
  for (int k2 = 1; k2 <= kmax; ++k2)
    for (int k1 = -kmax; k1 <= kmax; ++k1) add(k1, k2);
  return f;
}

FunctionalSet FunctionalSet::volume_averages(std::vector<std::array<double, 2>> centers,
                                             double radius) {
  if (!(radius > 0)) throw ConfigError("FunctionalSet::volume_averages: radius must be > 0");
  if (centers.empty())
    throw ConfigError("FunctionalSet::volume_averages: at least one center required");
  FunctionalSet f;
  f.kind_ = FunctionalKind::volume_averages;
  f.centers_ = std::move(centers);
  f.radius_ = radius;
  for (std::size_t i = 0; i < f.centers_.size(); ++i)
    for (int comp = 0; comp < 2; ++comp) {
      std::ostringstream l;
      l << "avg[" << i << "].u" << (comp + 1);
      f.labels_.push_back(l.str());
    }
  return f;
}

FunctionalSet FunctionalSet::explicit_matrix(GridPtr grid, Eigen::MatrixXd rows,
                                             std::vector<std::string> labels) {
  if (rows.cols() != 2 * grid->canonical_count())
    throw ConfigError("FunctionalSet::explicit_matrix: column count mismatch");
  if (static_cast<int>(labels.size()) != rows.rows())
    throw ConfigError("FunctionalSet::explicit_matrix: label count mismatch");
  FunctionalSet f;
  f.kind_ = FunctionalKind::explicit_matrix;
  f.bound_grid_ = std::move(grid);
  f.explicit_ = std::move(rows);
  f.labels_ = std::move(labels);
  return f;
}

int FunctionalSet::size() const { return static_cast<int>(labels_.size()); }

Eigen::MatrixXd FunctionalSet::build_matrix(const SpectralGrid& g) const {
  const int ncols = 2 * g.canonical_count();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(size(), ncols);
  switch (kind_) {
    case FunctionalKind::modes: {
      int row = 0;
      const int kmax = static_cast<int>(std::sqrt(static_cast<double>(cutoff_k_sq_))) + 1;
      if (kmax > g.n_max())
        throw ConfigError("FunctionalSet::modes: cutoff exceeds the grid");
      auto add = [&](int k1, int k2) {
        if (k1 * k1 + k2 * k2 > cutoff_k_sq_) return;
        const int m = g.canonical_index(k1, k2);
        if (m < 0) throw ConfigError("FunctionalSet::modes: mode outside the grid");
        mat(row++, 2 * m) = 1.0;
        mat(row++, 2 * m + 1) = 1.0;
      };
      for (int k1 = 1; k1 <= kmax; ++k1) add(k1, 0);
      for (int k2 = 1; k2 <= kmax; ++k2)
        for (int k1 = -kmax; k1 <= kmax; ++k1) add(k1, k2);
      break;
    }
    case FunctionalKind::volume_averages: {
      const double s2 = std::sqrt(2.0);
      for (std::size_t ci = 0; ci < centers_.size(); ++ci) {
        const double x0 = centers_[ci][0];
        const double y0 = centers_[ci][1];
        for (int comp = 0; comp < 2; ++comp) {
          const int row = static_cast<int>(2 * ci) + comp;
          for (int m = 0; m < g.canonical_count(); ++m) {
            const Mode& k = g.mode(m);
            const double kn = std::sqrt(g.k_norm_sq(m));
            double e1, e2;
            g.tangent(m, e1, e2);
            const double ec = (comp == 0) ? e1 : e2;
            // disk average of e^{ik.x}: (2 / (|k| r)) J1(|k| r) e^{ik.x0}
            const double amp = 2.0 / (kn * radius_) * std::cyl_bessel_j(1, kn * radius_);
            const double phase = k.k1 * x0 + k.k2 * y0;
            mat(row, 2 * m) = s2 * ec * amp * std::cos(phase);
            mat(row, 2 * m + 1) = s2 * ec * amp * std::sin(phase);
          }
        }
      }
      break;
    }
    case FunctionalKind::explicit_matrix: {
      if (g != *bound_grid_)
        throw ConfigError("FunctionalSet::explicit_matrix: bound to a different grid");
      mat = explicit_;
      break;
    }
  }
  return mat;
}

const Eigen::MatrixXd& FunctionalSet::evaluation_matrix(const SpectralGrid& g) const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  auto it = cache_.find(g.n_max());
  if (it == cache_.end()) {
    auto mat = std::make_shared<Eigen::MatrixXd>(build_matrix(g));
    it = cache_.emplace(g.n_max(), std::move(mat)).first;
  }
  return *it->second;
}

Eigen::VectorXd FunctionalSet::evaluate(const SpectralField& u) const {
  return evaluation_matrix(u.grid()) * field_to_vector(u);
}

double FunctionalSet::eta(const SpectralField& u) const {
  if (size() == 0) return 0.0;
  const Eigen::VectorXd vals = evaluate(u);
  return vals.cwiseAbs().maxCoeff() * vals.cwiseAbs().maxCoeff();
}

namespace {

Eigen::VectorXd column_weights(const SpectralGrid& g, const SpaceSpec& s) {
  Eigen::VectorXd w(2 * g.canonical_count());
  for (int m = 0; m < g.canonical_count(); ++m) {
    const double v = s.weight(g.a(m));
    w(2 * m) = v;
    w(2 * m + 1) = v;
  }
  return w;
}

void check_rank(const Eigen::MatrixXd& lmat, const std::vector<std::string>& labels) {
  if (lmat.rows() == 0) return;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lmat, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (lmat.rows() > lmat.cols() || smin < 1e-10 * smax) {
    // name the rows dominating the near-null left singular direction
    std::ostringstream msg;
    msg << "functional family is rank deficient (sigma_min/sigma_max = "
        << (smax > 0 ? smin / smax : 0.0) << "); near-dependent rows:";
    if (lmat.rows() > lmat.cols()) {
      msg << " more functionals than truncation dimensions";
    } else {
      const Eigen::VectorXd u = svd.matrixU().col(sv.size() - 1);
      const double peak = u.cwiseAbs().maxCoeff();
      for (int i = 0; i < u.size(); ++i)
        if (std::abs(u(i)) >= 0.5 * peak) msg << " " << labels[i];
    }
    throw ConfigError(msg.str());
  }
}

}  // namespace

DefectReport completeness_defect(const FunctionalSet& L, const SpacePair& pair,
                                 GridPtr truncation) {
  const SpectralGrid& g = *truncation;
  const Eigen::MatrixXd& lmat = L.evaluation_matrix(g);
  const int ncols = static_cast<int>(lmat.cols());
  const int r = static_cast<int>(lmat.rows());
  check_rank(lmat, L.labels());

  const Eigen::VectorXd dx = column_weights(g, pair.x);
  const Eigen::VectorXd dy = column_weights(g, pair.y);
  const Eigen::VectorXd dx_isqrt = dx.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd ratio = dy.cwiseQuotient(dx);

  DefectReport report;
  report.truncation_n_max = g.n_max();

  Eigen::VectorXd w_y;  // maximizer in y-coordinates
  if (r == 0) {
    int best = 0;
    for (int i = 1; i < ncols; ++i)
      if (ratio(i) > ratio(best)) best = i;
    report.eps = std::sqrt(ratio(best));
    w_y = Eigen::VectorXd::Zero(ncols);
    w_y(best) = 1.0;
  } else {
    // null space of L within the X-unit geometry
    const Eigen::MatrixXd b_t = (lmat * dx_isqrt.asDiagonal()).transpose();  // N x r
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b_t);
    const Eigen::MatrixXd q_full = qr.householderQ();
    const Eigen::MatrixXd z = q_full.rightCols(ncols - r);
    const Eigen::MatrixXd zs = ratio.cwiseSqrt().asDiagonal() * z;
    const Eigen::MatrixXd t = zs.transpose() * zs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const int last = static_cast<int>(t.rows()) - 1;
    report.eps = std::sqrt(std::max(es.eigenvalues()(last), 0.0));
    w_y = z * es.eigenvectors().col(last);
  }
  const Eigen::VectorXd w = dx_isqrt.cwiseProduct(w_y);  // unit X norm
  report.maximizer =
      std::make_shared<SpectralField>(field_from_vector(truncation, w));
  report.c_l = defect_constant(L, report.eps, pair, truncation);
  return report;
}

double defect_constant(const FunctionalSet& L, double eps, const SpacePair& pair,
                       GridPtr truncation) {
  (void)eps;
  const SpectralGrid& g = *truncation;
  const Eigen::MatrixXd& lmat = L.evaluation_matrix(g);
  const int r = static_cast<int>(lmat.rows());
  if (r == 0) return 0.0;
  const Eigen::VectorXd dx = column_weights(g, pair.x);
  const Eigen::VectorXd dy = column_weights(g, pair.y);
  // X-orthogonal complement of null(L) is spanned by W = D_X^{-1} L^T;
  // on it, ||w||_Y <= sqrt(r) sigma_max(D_Y^{1/2} W G^{-1}) max_j |l_j(w)|
  // with G = L W. Combined with the defect on null(L) this certifies (2).
  const Eigen::MatrixXd w = dx.cwiseInverse().asDiagonal() * lmat.transpose();  // N x r
  const Eigen::MatrixXd gmat = lmat * w;                                        // r x r
  const Eigen::MatrixXd m = dy.cwiseSqrt().asDiagonal() * w * gmat.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return std::sqrt(static_cast<double>(r)) * svd.singularValues()(0);
}

SampledConstant defect_constant_sampled(const FunctionalSet& L, double eps,
                                        const SpacePair& pair, GridPtr truncation,
                                        int n_samples, std::uint64_t seed) {
  const SpectralGrid& g = *truncation;
  const Eigen::MatrixXd& lmat = L.evaluation_matrix(g);
  const int ncols = static_cast<int>(lmat.cols());
  const int r = static_cast<int>(lmat.rows());
  if (r == 0) return {};
  const Eigen::VectorXd dx = column_weights(g, pair.x);
  const Eigen::VectorXd dy = column_weights(g, pair.y);

  auto ratio_of = [&](const Eigen::VectorXd& u) -> double {
    const double nx = std::sqrt(u.dot(dx.cwiseProduct(u)));
    const double ny = std::sqrt(u.dot(dy.cwiseProduct(u)));
    const double lmax = (lmat * u).cwiseAbs().maxCoeff();
    if (lmax < 1e-13 * std::max(1.0, nx)) return -1.0;
    return (ny - eps * nx) / lmax;
  };

  // The large ratios live near the null space of L: start from the
  // defect maximizer, mix in range-space leakage of both signs.
  const Eigen::MatrixXd w = dx.cwiseInverse().asDiagonal() * lmat.transpose();
  const Eigen::MatrixXd gmat = lmat * w;
  const Eigen::LLT<Eigen::MatrixXd> solver(gmat);
  auto null_project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - w * solver.solve(lmat * v);
  };
  Eigen::VectorXd w_max = Eigen::VectorXd::Zero(ncols);
  {
    // power iteration for the null-space defect maximizer (X geometry)
    Eigen::VectorXd v = Eigen::VectorXd::Ones(ncols);
    for (int i = 0; i < ncols; ++i) v(i) += 0.01 * (i % 7);
    for (int it = 0; it < 200; ++it) {
      v = null_project(dy.cwiseQuotient(dx).cwiseProduct(v));
      v /= std::sqrt(v.dot(dx.cwiseProduct(v)));
    }
    w_max = v;
  }

  SampledConstant best;
  Eigen::VectorXd best_u;
  // mixing angles between the null maximizer and a range direction;
  // theta = pi/2 is the pure range candidate
  const double thetas[] = {0.9, 0.5, 0.25, 0.1, -0.9, -0.5, -0.25, -0.1,
                           M_PI / 2.0};
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd rho(r);
    for (int i = 0; i < r; ++i) {
      const auto [g1, g2] = rng::normal_pair(seed, 1000 + i, s);
      rho(i) = (s % 2 == 0) ? g1 : g2;
    }
    Eigen::VectorXd q = w * rho;  // range-space direction
    const double qx = std::sqrt(q.dot(dx.cwiseProduct(q)));
    if (qx <= 0) continue;
    q /= qx;
    for (double theta : thetas) {
      Eigen::VectorXd u = std::cos(theta) * w_max + std::sin(theta) * q;
      const double ux = std::sqrt(u.dot(dx.cwiseProduct(u)));
      if (ux <= 0) continue;
      u /= ux;
      const double v = ratio_of(u);
      if (v > best.value) {
        best.value = v;
        best_u = u;
      }
    }
  }
  // local refinement: shrink the leakage around the incumbent
  if (best_u.size() > 0) {
    double step = 0.1;
    for (int it = 0; it < 300; ++it) {
      Eigen::VectorXd u = best_u;
      const auto [g1, g2] = rng::normal_pair(seed ^ 0x5bd1e995, 17, it);
      const int i = static_cast<int>(rng::hash3(seed, 23, it) % ncols);
      const int j = static_cast<int>(rng::hash3(seed, 29, it) % ncols);
      u(i) += step * g1;
      u(j) += step * g2;
      u /= std::sqrt(u.dot(dx.cwiseProduct(u)));
      const double v = ratio_of(u);
      if (v > best.value) {
        best.value = v;
        best_u = u;
      } else {
        step *= 0.995;
      }
    }
    best.achiever =
        std::make_shared<SpectralField>(field_from_vector(truncation, best_u));
  }
  return best;
}

int first_excluded_k_sq(int cutoff_k_sq) {
  const int kmax = static_cast<int>(std::sqrt(static_cast<double>(cutoff_k_sq))) + 2;
  int best = 0;
  for (int k1 = 0; k1 <= kmax; ++k1)
    for (int k2 = 0; k2 <= kmax; ++k2) {
      const int s = k1 * k1 + k2 * k2;
      if (s > cutoff_k_sq && (best == 0 || s < best)) best = s;
    }
  return best;
}

double modes_defect_analytic(int cutoff_k_sq, const SpacePair& pair) {
  const bool vh = pair.x.kind == SpaceSpec::Kind::V && pair.y.kind == SpaceSpec::Kind::H;
  const bool hw = pair.x.kind == SpaceSpec::Kind::H && pair.y.kind == SpaceSpec::Kind::W;
  if (!vh && !hw)
    throw ConfigError("modes_defect_analytic: supported pairs are (V,H) and (H,W)");
  const double a_excl = 0.5 * first_excluded_k_sq(cutoff_k_sq);
  return std::sqrt(pair.y.weight(a_excl) / pair.x.weight(a_excl));
}

}  // namespace detfun
