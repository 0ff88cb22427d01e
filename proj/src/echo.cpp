// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/echo.hpp"

#include <cmath>

namespace bsm {

SimContext SimContext::make(const ScenarioConfig& cfg) {
  validate(cfg);
  SimContext c;
  c.cfg = cfg;
  c.arrays = ArrayGeometry::from(cfg);
  // random baselines draw from a stream reserved for the tag itself
  c.tag = make_tag(cfg, RngStream{cfg.mc.seed, ~std::uint64_t{0}});
  c.truncate = cfg.waveform.truncate;
  c.threshold = cfar_threshold(cfg.arrays.m_ant, cfg.detector.sigma2, cfg.detector.p_fa_sys);
  c.n_frame = n_s_frame(cfg);
  c.n_dwell = n_s_dwell(cfg);
  return c;
}

EchoSources echo_sources(const SimContext& ctx, const ChannelRealization& chan, const CVec& w, const CVec* reflection) {
  EchoSources s;
  const double m = ctx.arrays.m_ant;
  const double n = ctx.arrays.n_bm;
  if (reflection != nullptr) s.tagged = apply_h_bsm(chan.h_tv, *reflection, w) / std::sqrt(m * n);
  s.clutter = chan.h_sc * w / std::sqrt(m);
  return s;
}

CVec probing_symbols(int n_s, Rng& rng) {
  CVec x(n_s);
  for (int i = 0; i < n_s; ++i) x(i) = rng.unit_phase();
  return x;
}

CMat synthesize_echo(const EchoSources& src, const CVec& alpha_eff, const CVec& x, int n_obs, double p_tx, double sigma2,
                     Rng& rng) {
  const Eigen::Index ns = x.size();
  const Eigen::Index m = src.clutter.size();
  const double amp = std::sqrt(double(n_obs) * p_tx);
  const double camp = amp / std::sqrt(double(ns));
  const bool has_tag = src.tagged.size() == m;
  CMat y(m, ns);
  for (Eigen::Index n = 0; n < ns; ++n) {
    const cd xn = x(n);
    const cd ta = has_tag ? amp * alpha_eff(n) * xn : cd{};
    const cd ca = camp * xn;
    for (Eigen::Index r = 0; r < m; ++r) {
      cd v = ca * src.clutter(r) + rng.cgauss(sigma2);
      if (has_tag) v += ta * src.tagged(r);
      y(r, n) = v;
    }
  }
  return y;
}

DetectionOutcome observe(const SimContext& ctx, const EchoSources& src, int n_obs, Rng& rng) {
  const int ns = ctx.cfg.waveform.n_s;
  const AsyncOffset off{static_cast<int>(rng.below(static_cast<std::uint64_t>(ns))), rng.uniform()};
  const CVec a_eff = effective_tag(ctx.tag.alpha, off, ctx.tag.pulse, ctx.truncate);
  const CVec x = probing_symbols(ns, rng);
  const CMat y = synthesize_echo(src, a_eff, x, n_obs, ctx.cfg.detector.p_tx, ctx.cfg.detector.sigma2, rng);

  // timing-acquired template: projected effective tag, unit norm
  CVec templ = a_eff;
  const CMat& u = ctx.tag.clutter_basis;
  if (u.cols() > 0) templ -= u * (u.adjoint() * a_eff);
  const double nrm = templ.norm();
  if (nrm > 0.0) templ /= nrm;
  return matched_filter(y, x, templ, u, ctx.threshold);
}

}  // namespace bsm
