// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/channel.hpp"
#include "bsmimo/codebook.hpp"
#include "bsmimo/detect.hpp"
#include "bsmimo/rng.hpp"
#include "bsmimo/scenario.hpp"
#include "bsmimo/tagwave.hpp"

namespace bsm {

// Everything a Monte Carlo trial needs that depends only on the configuration.
struct SimContext {
  ScenarioConfig cfg;
  ArrayGeometry arrays;
  TagDesign tag;
  Truncation truncate = Truncation::full_span;
  double threshold = 0.0;  // CFAR T_th
  int n_frame = 0;
  int n_dwell = 0;

  static SimContext make(const ScenarioConfig& cfg);
};

// Echo components for one coherent observation. `tagged` is H_bsm w scaled to
// the nominal |b0|^4 G_BS G_BM energy; `clutter` is H_sc w scaled by 1/sqrt(M).
struct EchoSources {
  CVec tagged;  // empty: no tagged echo (target not illuminated or absent)
  CVec clutter;
};

EchoSources echo_sources(const SimContext& ctx, const ChannelRealization& chan, const CVec& w, const CVec* reflection);

// Y[:, n] = sqrt(N_obs P) (tagged * alpha~[n] + clutter / sqrt(N_s)) x[n] + noise
CMat synthesize_echo(const EchoSources& src, const CVec& alpha_eff, const CVec& x, int n_obs, double p_tx, double sigma2,
                     Rng& rng);

// Draws a fresh offset, symbol block and noise, synthesizes Y and runs the
// timing-acquired matched filter.
DetectionOutcome observe(const SimContext& ctx, const EchoSources& src, int n_obs, Rng& rng);

// Unit-modulus probing symbols with uniform phases.
CVec probing_symbols(int n_s, Rng& rng);

}  // namespace bsm
