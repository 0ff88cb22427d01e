// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/align.hpp"

#include <algorithm>
#include <cmath>

namespace bsm {

AlignParams AlignParams::from(const ScenarioConfig& cfg, double theta_a, double theta_d) {
  AlignParams p;
  p.theta_a = theta_a;
  p.theta_d = theta_d;
  p.n_s_dwell = bsm::n_s_dwell(cfg);
  p.kappa = cfg.channel.kappa;
  p.p_tx = cfg.detector.p_tx;
  p.sigma2 = cfg.detector.sigma2;
  p.beta0_pow4 = std::pow(cfg.channel.beta0_abs, 4);
  p.omega = cfg.channel.omega;
  return p;
}

double gamma_los(const AlignParams& p) {
  return 4.0 * p.n_s_dwell * p.p_tx * p.kappa * p.beta0_pow4 / (p.sigma2 * (p.kappa + 1.0) * p.theta_a * p.theta_d);
}

double mu_nlos(const AlignParams& p) {
  return 1.0 + 4.0 * p.n_s_dwell * p.p_tx * p.beta0_pow4 / (p.sigma2 * (p.kappa + 1.0) * p.theta_a * p.omega);
}

double eta(const AlignParams& p) {
  const double noise = p.sigma2 * (p.kappa + 1.0) * p.theta_a / (4.0 * p.n_s_dwell * p.p_tx);
  return p.kappa * p.beta0_pow4 / p.theta_d / (p.beta0_pow4 / p.omega + noise);
}

ProbValue pout_analytic(const AlignParams& p, BeamCount count) {
  const double k = count == BeamCount::ceiling ? double(beam_count(p.omega, p.theta_a)) : p.omega / p.theta_a;
  if (k <= 1.0) return ProbValue(0.0);
  const double e = eta(p);
  // 1 - (1 - q)^{K-1} computed through log1p for small q
  const double q = std::exp(-e);
  return ProbValue(-std::expm1((k - 1.0) * std::log1p(-q)));
}

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  return best;
}

SweepResult run_sweep_trial(const SimContext& ctx, const ChannelRealization& chan, const Codebook& bs_cb,
                            const CVec& bm_default, Rng& rng) {
  SweepResult res;
  res.metrics.reserve(static_cast<std::size_t>(bs_cb.count()));
  for (const auto& w : bs_cb.codewords) {
    const EchoSources src = echo_sources(ctx, chan, w, &bm_default);
    res.metrics.push_back(observe(ctx, src, ctx.n_dwell, rng).statistic);
  }
  res.selected = argmax_lowest(res.metrics);
  res.true_index = bs_cb.bin_of(chan.geometry.theta_tx_0);
  res.outage = res.selected != res.true_index;
  return res;
}

SweepResult phase3_select(const SimContext& ctx, const ChannelRealization& chan, const CVec& locked_bs_codeword,
                          const Codebook& bm_cb_min, Rng& rng) {
  SweepResult res;
  res.metrics.reserve(static_cast<std::size_t>(bm_cb_min.count()));
  for (const auto& u : bm_cb_min.codewords) {
    const EchoSources src = echo_sources(ctx, chan, locked_bs_codeword, &u);
    res.metrics.push_back(observe(ctx, src, ctx.n_dwell, rng).statistic);
  }
  res.selected = argmax_lowest(res.metrics);
  res.true_index = bm_cb_min.bin_of(chan.geometry.theta_rx_0);
  res.outage = res.selected != res.true_index;
  return res;
}

namespace {

struct AlignTrial {
  std::uint8_t outage = 0;
  std::uint8_t phase3_ok = 0;
};

}  // namespace

AlignmentEstimate run_alignment_mc(const ScenarioConfig& cfg, double theta_a, double theta_d, std::int64_t trials,
                                   std::uint64_t seed, Exec exec, bool with_phase3) {
  if (trials < 1) throw std::invalid_argument("run_alignment_mc: trials must be >= 1");
  const SimContext ctx = SimContext::make(cfg);
  const double omega = cfg.channel.omega;
  const Codebook bs = build_bs_codebook(theta_a, omega, cfg.arrays.m_ant);
  const Codebook bm = build_bm_codebook(theta_d, omega, cfg.arrays.n_bm, cfg.arrays.d_bm);
  const Codebook bm_min = build_bm_codebook(theta_min_bm(cfg), omega, cfg.arrays.n_bm, cfg.arrays.d_bm);

  auto one = [&](std::int64_t i) {
    Rng rng(RngStream{seed, static_cast<std::uint64_t>(i)});
    const ChannelRealization chan = realize_channel(cfg, rng);
    const CVec& u = bm.codewords[static_cast<std::size_t>(bm.bin_of(chan.geometry.theta_rx_0))];
    const SweepResult s2 = run_sweep_trial(ctx, chan, bs, u, rng);
    AlignTrial t{static_cast<std::uint8_t>(s2.outage), 0};
    if (with_phase3) {
      const SweepResult s3 = phase3_select(ctx, chan, bs.codewords[static_cast<std::size_t>(s2.selected)], bm_min, rng);
      t.phase3_ok = !s3.outage;
    }
    return t;
  };
  const auto res = trial_map<AlignTrial>(trials, exec, one);

  std::int64_t no = 0, n3 = 0;
  for (const auto& t : res) {
    no += t.outage;
    n3 += t.phase3_ok;
  }
  AlignmentEstimate e;
  e.trials = trials;
  e.p_out_hat = ProbValue(double(no) / double(trials));
  e.ci = wilson_half_width(no, trials);
  e.phase3_hat = ProbValue(double(n3) / double(trials));
  e.ci_phase3 = wilson_half_width(n3, trials);
  return e;
}

}  // namespace bsm
