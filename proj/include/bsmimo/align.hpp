// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/codebook.hpp"
#include "bsmimo/echo.hpp"
#include "bsmimo/parallel.hpp"
#include "bsmimo/specfun.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bsm {

struct AlignParams {
  double theta_a = 0.25;
  double theta_d = 0.25;
  int n_s_dwell = 100;
  double kappa = 10.0;
  double p_tx = 1.0;
  double sigma2 = 1.0;
  double beta0_pow4 = 1.0;
  double omega = 2.0;

  static AlignParams from(const ScenarioConfig& cfg, double theta_a, double theta_d);
};

// Effective alignment SINR gamma_LoS / mu_NLoS.
double eta(const AlignParams& p);
double gamma_los(const AlignParams& p);
double mu_nlos(const AlignParams& p);

enum class BeamCount { ceiling, continuous };

// 1 - (1 - e^{-eta})^{K-1}
ProbValue pout_analytic(const AlignParams& p, BeamCount count = BeamCount::ceiling);

struct SweepResult {
  std::vector<double> metrics;
  int selected = 0;
  int true_index = 0;
  bool outage = false;
};

// Index of the largest entry; ties go to the lowest index.
int argmax_lowest(std::span<const double> v);

// Phase-II: sweep bs_cb with the target in its default reflection state.
SweepResult run_sweep_trial(const SimContext& ctx, const ChannelRealization& chan, const Codebook& bs_cb,
                            const CVec& bm_default, Rng& rng);

// Phase-III: sweep the narrowest reflection codebook under the locked BS beam.
SweepResult phase3_select(const SimContext& ctx, const ChannelRealization& chan, const CVec& locked_bs_codeword,
                          const Codebook& bm_cb_min, Rng& rng);

struct AlignmentEstimate {
  ProbValue p_out_hat;
  double ci = 0.0;
  ProbValue phase3_hat;  // fraction of trials with l* equal to the true AoA bin
  double ci_phase3 = 0.0;
  std::int64_t trials = 0;
};

// Phase-III is simulated only when with_phase3 is set; phase3_hat is 0 otherwise.
AlignmentEstimate run_alignment_mc(const ScenarioConfig& cfg, double theta_a, double theta_d, std::int64_t trials,
                                   std::uint64_t seed, Exec exec = Exec::parallel, bool with_phase3 = false);

}  // namespace bsm
