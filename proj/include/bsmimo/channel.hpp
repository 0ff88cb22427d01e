// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/rng.hpp"
#include "bsmimo/scenario.hpp"
#include "bsmimo/specfun.hpp"

#include <vector>

namespace bsm {

enum class Propagation { one_way, round_trip };

// Entry m is exp(-j 2 pi s m nu); round-trip doubles the phase rate.
CVec steering_vector(int n_elem, double nu, double spacing_over_lambda, Propagation mode = Propagation::one_way);

struct ArrayGeometry {
  int m_ant = 32;
  int n_bm = 32;
  double d_bs_over_lambda = 0.5;
  double d_bm_over_lambda = 0.25;

  static ArrayGeometry from(const ScenarioConfig& cfg);
};

struct NlosPath {
  double theta_tx;
  double theta_rx;
  cd beta;
};

struct Scatterer {
  double phi;
  cd lambda;
};

struct Geometry {
  double theta_tx_0 = 0.0;  // LoS AoD at the BS
  double theta_rx_0 = 0.0;  // LoS AoA at the target
  cd beta_0{1.0, 0.0};
  std::vector<NlosPath> nlos;
  std::vector<Scatterer> clutter;
};

struct ChannelRealization {
  CMat h_tv;  // N x M_ant
  CMat h_sc;  // M_ant x M_ant, complex-symmetric
  Geometry geometry;
  double kappa = 0.0;
};

Geometry sample_geometry(const ScenarioConfig& cfg, Rng& rng);

// |beta_0|^4 / sum_q |lambda_q|^4 (linear); +inf with no clutter.
double compute_scr(const Geometry& geom);

CMat build_h_tv(const Geometry& geom, double kappa, const ArrayGeometry& arrays);
CMat build_h_sc(const Geometry& geom, const ArrayGeometry& arrays);
// H_tv^T diag(phi) H_tv
CMat build_h_bsm(const CMat& h_tv, const CVec& phi);
// H_bsm w without forming H_bsm
CVec apply_h_bsm(const CMat& h_tv, const CVec& phi, const CVec& w);

ChannelRealization realize_channel(const ScenarioConfig& cfg, Rng& rng);

}  // namespace bsm
