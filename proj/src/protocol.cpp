// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/protocol.hpp"

#include "bsmimo/codebook.hpp"
#include "bsmimo/echo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace bsm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// with mu = 0 an episode never expires; stop after this many frames
constexpr std::int64_t max_frames_no_expiry = 1000000;

double wrapped_distance(double a, double b, double period) {
  double d = std::fmod(std::fabs(a - b), period);
  return std::min(d, period - d);
}

double beams(double omega, double theta_a, BeamCount count) {
  return count == BeamCount::ceiling ? double(beam_count(omega, theta_a)) : std::max(1.0, omega / theta_a);
}

}  // namespace

Timing Timing::from(const ScenarioConfig& cfg) {
  const auto& t = cfg.timing;
  Timing r{t.t_frame, t.t_dwell, t.t_iii, t.t_fb, t.mu};
  if (t.t_iii_mode == TiiiMode::derived) r.t_iii = beam_count(cfg.channel.omega, theta_min_bm(cfg)) * t.t_dwell;
  return r;
}

double t_align(double theta_a, const Timing& timing, double omega, BeamCount count) {
  if (!(theta_a > 0.0)) throw std::domain_error("t_align: theta_a must be positive");
  return beams(omega, theta_a, count) * timing.t_dwell + timing.t_iii + timing.t_fb;
}

ProbValue p_trig_analytic(double p_d, double theta_a, const Timing& timing, double omega, BeamCount count) {
  if (p_d <= 0.0) return ProbValue(0.0);
  const double ta = t_align(theta_a, timing, omega, count);
  const double a = std::exp(-timing.mu * (ta + timing.t_frame));
  const double b = std::exp(-timing.mu * timing.t_frame);
  return ProbValue(p_d * a / (1.0 - (1.0 - p_d) * b));
}

AnalyticModel AnalyticModel::make(const ScenarioConfig& cfg) {
  validate(cfg);
  const TagDesign tag = make_tag(cfg, RngStream{cfg.mc.seed, ~std::uint64_t{0}});
  return make(cfg, cfg.waveform.tag == TagMode::disabled ? 1.0 : tag.lambda_alpha);
}

AnalyticModel AnalyticModel::make(const ScenarioConfig& cfg, double lambda_alpha) {
  AnalyticModel m;
  m.cfg = cfg;
  m.det = DetectorSetup::from(cfg);
  m.timing = Timing::from(cfg);
  m.lambda_alpha = lambda_alpha;
  if (cfg.waveform.tag == TagMode::disabled) {
    // unmodulated echo: aggregate clutter N P sum|lambda_q|^4 spread over M antennas
    const double b4 = std::pow(cfg.channel.beta0_abs, 4);
    const double scr = std::pow(10.0, cfg.channel.scr_db / 10.0);
    const double per_sample = cfg.detector.p_tx * b4 / (scr * cfg.arrays.m_ant);
    m.clutter_floor_frame = n_s_frame(cfg) * per_sample;
    m.clutter_floor_dwell = n_s_dwell(cfg) * per_sample;
  }
  return m;
}

ProbValue AnalyticModel::p_d(double theta_d) const {
  DetectorSetup d = det;
  d.sigma2 += clutter_floor_frame;
  return pd_analytic(theta_d, d, cd(cfg.channel.beta0_abs, 0.0), cfg.channel.omega, lambda_alpha, cfg.arrays.m_ant,
                     PdMode::optimized_approx);
}

AlignParams AnalyticModel::align_params(double theta_a, double theta_d) const {
  AlignParams p = AlignParams::from(cfg, theta_a, theta_d);
  p.sigma2 += clutter_floor_dwell;
  return p;
}

ProbValue AnalyticModel::p_out(double theta_a, double theta_d) const {
  return pout_analytic(align_params(theta_a, theta_d), BeamCount::ceiling);
}

ProbValue AnalyticModel::p_e2e(double theta_d, double theta_a) const {
  const ProbValue pt = p_trig_analytic(p_d(theta_d), theta_a, timing, cfg.channel.omega);
  return ProbValue(pt * (1.0 - p_out(theta_a, theta_d)));
}

ProbValue p_e2e_analytic(double theta_d, double theta_a, const ScenarioConfig& cfg) {
  return AnalyticModel::make(cfg).p_e2e(theta_d, theta_a);
}

namespace {

struct Episode {
  std::uint8_t triggered = 0;
  std::uint8_t aligned = 0;
  std::uint8_t phase3_ok = 0;
};

}  // namespace

E2eEstimate run_e2e_mc(const ScenarioConfig& cfg, double theta_d, double theta_a, std::int64_t episodes,
                       std::uint64_t seed, Exec exec) {
  if (episodes < 1) throw std::invalid_argument("run_e2e_mc: episodes must be >= 1");
  const SimContext ctx = SimContext::make(cfg);
  const Timing timing = Timing::from(cfg);
  const double omega = cfg.channel.omega;
  const Codebook bm = build_bm_codebook(theta_d, omega, cfg.arrays.n_bm, cfg.arrays.d_bm);
  const Codebook bs = build_bs_codebook(theta_a, omega, cfg.arrays.m_ant);
  const Codebook bm_min = build_bm_codebook(theta_min_bm(cfg), omega, cfg.arrays.n_bm, cfg.arrays.d_bm);
  const double ta = t_align(theta_a, timing, omega);
  CVec w_dl = CVec::Zero(cfg.arrays.m_ant);
  w_dl(0) = 1.0;

  auto one = [&](std::int64_t i) {
    Rng rng(RngStream{seed, static_cast<std::uint64_t>(i)});
    const double t_coh = timing.mu > 0.0 ? rng.exponential(timing.mu) : inf;
    const ChannelRealization chan = realize_channel(cfg, rng);
    const int l = bm.bin_of(chan.geometry.theta_rx_0);
    const CVec& u = bm.codewords[static_cast<std::size_t>(l)];
    const double center = bm.centers[static_cast<std::size_t>(l)];
    const EchoSources lit_src = echo_sources(ctx, chan, w_dl, &u);
    const EchoSources dark_src = echo_sources(ctx, chan, w_dl, nullptr);

    Episode ep;
    for (std::int64_t n = 1; n <= max_frames_no_expiry; ++n) {
      // a detection at frame n is useless once n T_frame + T_align exceeds T_coh
      if (double(n) * timing.t_frame + ta > t_coh) break;
      const double nu_dl = rng.uniform(-0.5 * omega, 0.5 * omega);
      const bool lit = wrapped_distance(nu_dl, center, omega) <= 0.5 * theta_d;
      if (!observe(ctx, lit ? lit_src : dark_src, ctx.n_frame, rng).detected) continue;
      ep.triggered = 1;
      const SweepResult s2 = run_sweep_trial(ctx, chan, bs, u, rng);
      ep.aligned = !s2.outage;
      const SweepResult s3 = phase3_select(ctx, chan, bs.codewords[static_cast<std::size_t>(s2.selected)], bm_min, rng);
      ep.phase3_ok = !s3.outage;
      break;
    }
    return ep;
  };
  const auto res = trial_map<Episode>(episodes, exec, one);

  std::int64_t nt = 0, ns = 0, n3 = 0;
  for (const auto& e : res) {
    nt += e.triggered;
    ns += e.triggered & e.aligned;
    n3 += e.triggered & e.phase3_ok;
  }
  E2eEstimate est;
  est.episodes = episodes;
  est.triggers = nt;
  est.successes = ns;
  est.p_e2e_hat = ProbValue(double(ns) / double(episodes));
  est.p_trig_hat = ProbValue(double(nt) / double(episodes));
  est.p_align_given_trig_hat = ProbValue(nt > 0 ? double(ns) / double(nt) : 0.0);
  est.phase3_hat = ProbValue(nt > 0 ? double(n3) / double(nt) : 0.0);
  est.ci = wilson_half_width(ns, episodes);
  return est;
}

DesignBounds design_bounds(double theta_a, const ScenarioConfig& cfg, double p_trig, double p_align) {
  if (!(p_trig > 0.0 && p_trig < 1.0 + 1e-15 && p_align > 0.0 && p_align < 1.0 + 1e-15))
    throw std::invalid_argument("design_bounds: budgets must be in (0, 1]");
  const Timing timing = Timing::from(cfg);
  const double omega = cfg.channel.omega;
  const double a = std::exp(-timing.mu * (t_align(theta_a, timing, omega, BeamCount::continuous) + timing.t_frame));
  const double b = std::exp(-timing.mu * timing.t_frame);

  DesignBounds r;
  r.theta_d_lower = a > p_trig * b ? omega * p_trig * (1.0 - b) / (a - p_trig * b) : inf;
  const double k = omega / theta_a;
  if (k > 1.0) {
    // 1 - p_align^{1/(K-1)} via expm1 to keep precision for p_align near 1
    const double x = -std::expm1(std::log(p_align) / (k - 1.0));
    r.eta_req = x > 0.0 ? -std::log(x) : inf;
  }
  // eta(theta_d) = c / theta_d, so eta >= eta_req iff theta_d <= c / eta_req
  AlignParams p = AlignParams::from(cfg, theta_a, 1.0);
  const double c = eta(p);
  r.theta_d_upper = r.eta_req > 0.0 ? c / r.eta_req : inf;
  const double lo = std::max(theta_min_bm(cfg), r.theta_d_lower);
  const double hi = std::min(omega, r.theta_d_upper);
  r.feasible = lo <= hi;
  return r;
}

Interval feasible_fa_set(const ScenarioConfig& cfg, std::span<const double> theta_d_grid) {
  // The CFAR threshold depends on (M, sigma2, P_FA^sys) alone; evaluate the
  // realized false-alarm rate per candidate anyway and keep those that meet it.
  Interval r{inf, -inf};
  for (double td : theta_d_grid) {
    const double thr = cfar_threshold(cfg.arrays.m_ant, cfg.detector.sigma2, cfg.detector.p_fa_sys);
    const double pfa = reg_upper_gamma(cfg.arrays.m_ant, thr / cfg.detector.sigma2);
    if (pfa <= cfg.detector.p_fa_sys * (1.0 + 1e-9)) {
      r.lo = std::min(r.lo, td);
      r.hi = std::max(r.hi, td);
    }
  }
  return r;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

std::vector<double> trigger_budgets(const ProtocolConfig& pc) {
  if (pc.p_trig_budget) return {*pc.p_trig_budget};
  if (pc.split == BudgetSplit::symmetric) return {std::sqrt(pc.p_req)};
  // p_trig = p_req^t for t on (0, 1), so p_align = p_req^{1-t}
  constexpr int n = 256;
  std::vector<double> v;
  for (int i = 1; i < n; ++i) v.push_back(std::pow(pc.p_req, double(i) / n));
  return v;
}

DesignLawResult solve_with_model(const AnalyticModel& model, std::span<const double> ta_grid,
                                 std::span<const double> td_grid, DesignMode mode) {
  const ScenarioConfig& cfg = model.cfg;
  const double omega = cfg.channel.omega;
  const double p_req = cfg.protocol.p_req;
  const std::vector<double> budgets = trigger_budgets(cfg.protocol);
  DesignLawResult r;
  r.mode = mode;

  std::vector<double> pd(td_grid.size());
  for (std::size_t j = 0; j < td_grid.size(); ++j) pd[j] = model.p_d(td_grid[j]);

  r.envelope.resize(ta_grid.size());
  r.bounds.resize(ta_grid.size());
  std::vector<double> split(ta_grid.size(), budgets.front());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(ta_grid.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double ta = ta_grid[i];
    EnvelopePoint e{ta, -1.0, td_grid.empty() ? 0.0 : td_grid[0]};
    for (std::size_t j = 0; j < td_grid.size(); ++j) {
      const double v = p_trig_analytic(pd[j], ta, model.timing, omega) * (1.0 - model.p_out(ta, td_grid[j]));
      if (v > e.psi) e = {ta, v, td_grid[j]};
    }
    r.envelope[i] = e;
    // first budget split that admits a default beamwidth
    r.bounds[i] = design_bounds(ta, cfg, budgets.front(), std::min(1.0, p_req / budgets.front()));
    for (double pt : budgets) {
      const DesignBounds b = design_bounds(ta, cfg, pt, std::min(1.0, p_req / pt));
      if (b.feasible) {
        r.bounds[i] = b;
        split[i] = pt;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < ta_grid.size(); ++i) {
    const bool ok = mode == DesignMode::exact_envelope ? r.envelope[i].psi >= p_req : r.bounds[i].feasible;
    if (!ok) continue;
    r.feasible = true;
    r.index = static_cast<int>(i);
    r.theta_a_star = ta_grid[i];
    r.theta_d_star = mode == DesignMode::exact_envelope ? r.envelope[i].theta_d_best
                                                        : std::min(omega, r.bounds[i].theta_d_upper);
    break;
  }
  if (!r.bounds.empty()) {
    const std::size_t at = r.feasible ? static_cast<std::size_t>(r.index) : r.bounds.size() - 1;
    r.theta_d_lower = r.bounds[at].theta_d_lower;
    r.theta_d_upper = r.bounds[at].theta_d_upper;
    r.p_trig_budget = split[at];
    r.p_align_budget = std::min(1.0, p_req / split[at]);
  }
  return r;
}

}  // namespace

DesignLawResult solve_design_law(const ScenarioConfig& cfg, std::span<const double> theta_a_grid,
                                 std::span<const double> theta_d_grid, DesignMode mode) {
  return solve_with_model(AnalyticModel::make(cfg), theta_a_grid, theta_d_grid, mode);
}

DesignLawResult solve_design_law(const ScenarioConfig& cfg, DesignMode mode) {
  const double omega = cfg.channel.omega;
  const int n = cfg.protocol.grid_points;
  const auto ta = log_grid(std::min(theta_min_bs(cfg), omega), omega, n);
  const auto td = log_grid(std::min(theta_min_bm(cfg), omega), omega, n);
  return solve_design_law(cfg, ta, td, mode);
}

LockedLinkMetrics locked_link_metrics(double theta_a, double theta_bm, double p_tx, double beta0_pow4, double sigma2) {
  if (!(theta_a > 0.0 && theta_bm > 0.0 && p_tx > 0.0 && beta0_pow4 > 0.0 && sigma2 > 0.0))
    throw std::invalid_argument("locked_link_metrics: inputs must be positive");
  const double rho = 4.0 * p_tx * beta0_pow4 / (sigma2 * theta_a * theta_bm);
  return {rho, std::log2(1.0 + rho), theta_a * theta_a / 12.0};
}

std::vector<GatedCell> gated_quality(const ScenarioConfig& cfg, std::span<const double> scr_db,
                                     std::span<const double> inv_kappa_db, bool tag_enabled) {
  ScenarioConfig base = cfg;
  if (!tag_enabled) base.waveform.tag = TagMode::disabled;
  const double lambda = AnalyticModel::make(base).lambda_alpha;
  const double omega = cfg.channel.omega;
  const auto ta = log_grid(std::min(theta_min_bs(cfg), omega), omega, cfg.protocol.grid_points);
  const auto td = log_grid(std::min(theta_min_bm(cfg), omega), omega, cfg.protocol.grid_points);

  std::vector<GatedCell> out;
  out.reserve(scr_db.size() * inv_kappa_db.size());
  for (double s : scr_db) {
    for (double ik : inv_kappa_db) {
      ScenarioConfig c = base;
      c.channel.scr_db = s;
      c.channel.kappa = std::pow(10.0, -ik / 10.0);
      const DesignLawResult r = solve_with_model(AnalyticModel::make(c, lambda), ta, td, DesignMode::exact_envelope);
      GatedCell cell{s, ik, r.feasible, -inf, r.theta_a_star, r.theta_d_star};
      if (r.feasible) {
        const auto m = locked_link_metrics(r.theta_a_star, theta_min_bm(c), c.detector.p_tx,
                                           std::pow(c.channel.beta0_abs, 4), c.detector.sigma2);
        cell.rho_eff_db = 10.0 * std::log10(m.rho_lock);
      }
      out.push_back(cell);
    }
  }
  return out;
}

namespace {

void json_num(std::ostream& os, double v) {
  if (std::isfinite(v))
    os << v;
  else
    os << "null";
}

}  // namespace

void write_design_law_json(std::ostream& os, const DesignLawResult& r) {
  const auto old = os.precision(9);
  os << "{\n  \"mode\": \"" << (r.mode == DesignMode::exact_envelope ? "exact_envelope" : "asymptotic") << "\",\n";
  os << "  \"feasible\": " << (r.feasible ? "true" : "false") << ",\n";
  os << "  \"theta_a_star\": ";
  json_num(os, r.theta_a_star);
  os << ",\n  \"theta_d_star\": ";
  json_num(os, r.theta_d_star);
  os << ",\n  \"theta_d_lower\": ";
  json_num(os, r.theta_d_lower);
  os << ",\n  \"theta_d_upper\": ";
  json_num(os, r.theta_d_upper);
  os << ",\n  \"index\": " << r.index << ",\n  \"p_trig_budget\": ";
  json_num(os, r.p_trig_budget);
  os << ",\n  \"p_align_budget\": ";
  json_num(os, r.p_align_budget);
  os << ",\n  \"envelope\": [";
  for (std::size_t i = 0; i < r.envelope.size(); ++i) {
    const auto& e = r.envelope[i];
    os << (i ? ",\n" : "\n") << "    {\"theta_a\": ";
    json_num(os, e.theta_a);
    os << ", \"psi\": ";
    json_num(os, e.psi);
    os << ", \"theta_d_best\": ";
    json_num(os, e.theta_d_best);
    if (i < r.bounds.size()) {
      os << ", \"theta_d_lower\": ";
      json_num(os, r.bounds[i].theta_d_lower);
      os << ", \"theta_d_upper\": ";
      json_num(os, r.bounds[i].theta_d_upper);
      os << ", \"eta_req\": ";
      json_num(os, r.bounds[i].eta_req);
      os << ", \"feasible\": " << (r.bounds[i].feasible ? "true" : "false");
    }
    os << "}";
  }
  os << "\n  ]\n}\n";
  os.precision(old);
}

}  // namespace bsm
