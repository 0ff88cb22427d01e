// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bsm {

CVec steering_vector(int n_elem, double nu, double spacing_over_lambda, Propagation mode) {
  if (n_elem < 1) throw std::invalid_argument("steering_vector: n_elem must be >= 1");
  if (!(std::fabs(nu) <= 1.0)) throw std::domain_error("steering_vector: |nu| must be <= 1");
  const double rate = (mode == Propagation::round_trip ? 4.0 : 2.0) * std::numbers::pi * spacing_over_lambda * nu;
  CVec a(n_elem);
  for (int m = 0; m < n_elem; ++m) a(m) = std::polar(1.0, -rate * m);
  return a;
}

ArrayGeometry ArrayGeometry::from(const ScenarioConfig& cfg) {
  return {cfg.arrays.m_ant, cfg.arrays.n_bm, cfg.arrays.d_bs, cfg.arrays.d_bm};
}

Geometry sample_geometry(const ScenarioConfig& cfg, Rng& rng) {
  const auto& ch = cfg.channel;
  const double half = 0.5 * ch.omega;
  Geometry g;
  g.theta_tx_0 = rng.uniform(-half, half);
  g.theta_rx_0 = rng.uniform(-half, half);
  g.beta_0 = ch.beta0_abs * rng.unit_phase();

  const double path_var = ch.beta0_abs * ch.beta0_abs;
  g.nlos.reserve(static_cast<std::size_t>(ch.paths));
  for (int p = 0; p < ch.paths; ++p) {
    NlosPath path{};
    path.theta_tx = rng.uniform(-half, half);
    path.theta_rx = rng.uniform(-half, half);
    path.beta = rng.cgauss(path_var);
    g.nlos.push_back(path);
  }

  if (ch.scatterers > 0) {
    // Q |lambda|^4 = |beta_0|^4 / SCR
    const double scr = std::pow(10.0, ch.scr_db / 10.0);
    const double b4 = std::pow(ch.beta0_abs, 4);
    const double mag = std::pow(b4 / (scr * ch.scatterers), 0.25);
    g.clutter.reserve(static_cast<std::size_t>(ch.scatterers));
    for (int q = 0; q < ch.scatterers; ++q) {
      Scatterer s{};
      s.phi = rng.uniform(-half, half);
      s.lambda = mag * rng.unit_phase();
      g.clutter.push_back(s);
    }
  }
  return g;
}

double compute_scr(const Geometry& geom) {
  double denom = 0.0;
  for (const auto& s : geom.clutter) denom += std::pow(std::abs(s.lambda), 4);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(std::abs(geom.beta_0), 4) / denom;
}

CMat build_h_tv(const Geometry& geom, double kappa, const ArrayGeometry& arr) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("build_h_tv: kappa must be nonnegative");
  const double los = std::isinf(kappa) ? 1.0 : std::sqrt(kappa / (kappa + 1.0));
  const double nlos = std::isinf(kappa) ? 0.0 : std::sqrt(1.0 / (kappa + 1.0));

  CMat h = CMat::Zero(arr.n_bm, arr.m_ant);
  if (los != 0.0) {
    const CVec an = steering_vector(arr.n_bm, geom.theta_rx_0, arr.d_bm_over_lambda);
    const CVec am = steering_vector(arr.m_ant, geom.theta_tx_0, arr.d_bs_over_lambda);
    h.noalias() += (los * geom.beta_0) * an * am.transpose();
  }
  if (nlos != 0.0 && !geom.nlos.empty()) {
    const double scale = nlos / std::sqrt(static_cast<double>(geom.nlos.size()));
    for (const auto& p : geom.nlos) {
      const CVec an = steering_vector(arr.n_bm, p.theta_rx, arr.d_bm_over_lambda);
      const CVec am = steering_vector(arr.m_ant, p.theta_tx, arr.d_bs_over_lambda);
      h.noalias() += (scale * p.beta) * an * am.transpose();
    }
  }
  return h;
}

CMat build_h_sc(const Geometry& geom, const ArrayGeometry& arr) {
  CMat h = CMat::Zero(arr.m_ant, arr.m_ant);
  // H_ti^T diag(lambda_q^2) H_ti with H_ti rows a^T(phi_q)
  for (const auto& s : geom.clutter) {
    const CVec a = steering_vector(arr.m_ant, s.phi, arr.d_bs_over_lambda);
    h.noalias() += (s.lambda * s.lambda) * a * a.transpose();
  }
  return h;
}

CMat build_h_bsm(const CMat& h_tv, const CVec& phi) {
  if (phi.size() != h_tv.rows()) throw ShapeError("build_h_bsm: phi length must equal H_tv rows");
  return h_tv.transpose() * phi.asDiagonal() * h_tv;
}

CVec apply_h_bsm(const CMat& h_tv, const CVec& phi, const CVec& w) {
  if (phi.size() != h_tv.rows() || w.size() != h_tv.cols()) throw ShapeError("apply_h_bsm: dimension mismatch");
  const CVec inc = h_tv * w;
  return h_tv.transpose() * phi.cwiseProduct(inc);
}

ChannelRealization realize_channel(const ScenarioConfig& cfg, Rng& rng) {
  const auto arr = ArrayGeometry::from(cfg);
  ChannelRealization c;
  c.geometry = sample_geometry(cfg, rng);
  c.kappa = cfg.channel.kappa;
  c.h_tv = build_h_tv(c.geometry, c.kappa, arr);
  c.h_sc = build_h_sc(c.geometry, arr);
  return c;
}

}  // namespace bsm
