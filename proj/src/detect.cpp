// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/detect.hpp"

#include "bsmimo/channel.hpp"
#include "bsmimo/codebook.hpp"
#include "bsmimo/echo.hpp"

#include <omp.h>

#include <cmath>
#include <numeric>

namespace bsm {

void set_worker_count(int workers) {
  if (workers >= 1) omp_set_num_threads(workers);
}

int worker_count() { return omp_get_max_threads(); }

DetectorSetup DetectorSetup::from(const ScenarioConfig& cfg) {
  return {ProbValue(cfg.detector.p_fa_sys), cfg.detector.sigma2, bsm::n_s_frame(cfg), cfg.detector.p_tx};
}

double cfar_threshold(int m_ant, double sigma2, double p_fa) {
  if (m_ant < 1) throw std::invalid_argument("cfar_threshold: m_ant must be >= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("cfar_threshold: sigma2 must be positive");
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw std::invalid_argument("cfar_threshold: p_fa must be in (0,1)");
  const double m = m_ant;
  auto fn = [m](double x) { return reg_upper_gamma(m, x).value(); };
  // the Gamma(M,1) upper tail at M + 40 sqrt(M) + 200 is far below any usable p_fa
  const double hi = m + 40.0 * std::sqrt(m) + 200.0;
  return sigma2 * solve_threshold(p_fa, fn, {0.0, hi});
}

DetectionOutcome matched_filter(const CMat& y, const CVec& x, const CVec& templ, const CMat& u, double threshold) {
  const Eigen::Index n = y.cols();
  if (x.size() != n || templ.size() != n) throw ShapeError("matched_filter: symbol/template length must equal N_s");
  if (u.cols() > 0 && u.rows() != n) throw ShapeError("matched_filter: clutter basis row count must equal N_s");
  CVec inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x(i)) < 1e-6) throw DegenerateSymbol("matched_filter: |x[n]| below 1e-6");
    inv(i) = 1.0 / x(i);
  }
  CVec tp = templ;
  if (u.cols() > 0) tp -= u * (u.adjoint() * templ);
  // r_m = sum_n (P_perp y_m)[n] conj(t[n]) with y_m the equalized sample row
  const CVec weights = inv.cwiseProduct(tp.conjugate());
  DetectionOutcome out;
  out.r = y * weights;
  out.statistic = out.r.squaredNorm();
  out.threshold = threshold;
  out.detected = out.statistic > threshold;
  return out;
}

DetectionOutcome matched_filter(const CMat& y, const CVec& x, const TagDesign& tag, double threshold) {
  return matched_filter(y, x, tag.alpha, tag.clutter_basis, threshold);
}

double rho_bar(double theta_d, const DetectorSetup& det, double beta0_abs, double lambda_alpha) {
  return 4.0 * det.n_s_frame * det.p_tx * std::pow(beta0_abs, 4) * lambda_alpha / (det.sigma2 * theta_d);
}

ProbValue pd_analytic(double theta_d, const DetectorSetup& det, cd beta0, double omega, double lambda_alpha, int m_ant,
                      PdMode mode, std::span<const double> energies) {
  if (!(theta_d > 0.0 && theta_d <= omega * (1.0 + 1e-12))) throw std::domain_error("pd_analytic: theta_d outside (0, omega]");
  const double t_th = cfar_threshold(m_ant, det.sigma2, det.p_fa_sys);
  const double b = std::sqrt(2.0 * t_th / det.sigma2);
  const double cover = std::min(theta_d / omega, 1.0);
  if (mode == PdMode::optimized_approx || energies.empty()) {
    const double rho = rho_bar(theta_d, det, std::abs(beta0), lambda_alpha);
    return ProbValue(cover * marcum_q(m_ant, std::sqrt(rho), b));
  }
  double acc = 0.0;
  for (double e : energies) acc += marcum_q(m_ant, std::sqrt(rho_bar(theta_d, det, std::abs(beta0), e)), b);
  return ProbValue(cover * acc / double(energies.size()));
}

double wilson_half_width(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0) return 1.0;
  const double nn = double(n);
  const double p = double(k) / nn;
  const double z2 = z * z;
  return z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
}

double wilson_center(std::int64_t k, std::int64_t n, double z) {
  const double nn = double(n);
  const double z2 = z * z;
  return (double(k) / nn + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
}

namespace {

struct DiscoveryTrial {
  std::uint8_t detected = 0;
  std::uint8_t false_alarm = 0;
};

double wrapped_distance(double a, double b, double period) {
  double d = std::fmod(std::fabs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace

DiscoveryEstimate run_discovery_mc(const ScenarioConfig& cfg, double theta_d, std::int64_t trials, std::uint64_t seed,
                                   Exec exec) {
  if (trials < 1) throw std::invalid_argument("run_discovery_mc: trials must be >= 1");
  const SimContext ctx = SimContext::make(cfg);
  const double omega = cfg.channel.omega;
  const Codebook bm = build_bm_codebook(theta_d, omega, cfg.arrays.n_bm, cfg.arrays.d_bm);
  CVec w_dl = CVec::Zero(cfg.arrays.m_ant);
  w_dl(0) = 1.0;

  auto one = [&](std::int64_t i) {
    const RngStream stream{seed, static_cast<std::uint64_t>(i)};
    Rng rng(stream);
    const ChannelRealization chan = realize_channel(cfg, rng);
    const int l = bm.bin_of(chan.geometry.theta_rx_0);
    const double nu_dl = rng.uniform(-0.5 * omega, 0.5 * omega);
    const bool lit = wrapped_distance(nu_dl, bm.centers[static_cast<std::size_t>(l)], omega) <= 0.5 * theta_d;
    const CVec& u = bm.codewords[static_cast<std::size_t>(l)];

    DiscoveryTrial t;
    const EchoSources src = echo_sources(ctx, chan, w_dl, lit ? &u : nullptr);
    t.detected = lit && observe(ctx, src, ctx.n_frame, rng).detected;

    Rng rng0(stream.child(1));
    const EchoSources src0 = echo_sources(ctx, chan, w_dl, nullptr);
    t.false_alarm = observe(ctx, src0, ctx.n_frame, rng0).detected;
    return t;
  };
  const auto res = trial_map<DiscoveryTrial>(trials, exec, one);

  std::int64_t nd = 0, nf = 0;
  for (const auto& t : res) {
    nd += t.detected;
    nf += t.false_alarm;
  }
  DiscoveryEstimate e;
  e.trials = trials;
  e.p_d_hat = ProbValue(double(nd) / double(trials));
  e.p_fa_hat = ProbValue(double(nf) / double(trials));
  e.ci = wilson_half_width(nd, trials);
  e.ci_fa = wilson_half_width(nf, trials);
  return e;
}

}  // namespace bsm
