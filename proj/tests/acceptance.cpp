// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include "bsmimo/align.hpp"
#include "bsmimo/codebook.hpp"
#include "bsmimo/detect.hpp"
#include "bsmimo/echo.hpp"
#include "bsmimo/protocol.hpp"
#include "bsmimo/tagwave.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace bsm;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int g_failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt <= budget_s;
  const bool ok = v.pass && in_time;
  if (!ok) ++g_failures;
  std::printf("%s C%d %s: %s [%.1fs of %.0fs%s]\n", ok ? "PASS" : "FAIL", id, name, v.detail.c_str(), dt, budget_s,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

// C1: noise-only trials through the full echo/receiver chain
Verdict cfar_calibration() {
  const double pfa = 1e-2;
  const std::int64_t trials = 100000;
  bool ok = true;
  std::string d;
  for (int m : {4, 32}) {
    ScenarioConfig cfg;
    cfg.arrays.m_ant = m;
    cfg.detector.p_fa_sys = pfa;
    const SimContext ctx = SimContext::make(cfg);
    EchoSources src;
    src.clutter = CVec::Zero(m);
    const auto hits = trial_map<std::uint8_t>(trials, Exec::parallel, [&](std::int64_t i) {
      Rng rng(RngStream{101, static_cast<std::uint64_t>(i)});
      return static_cast<std::uint8_t>(observe(ctx, src, ctx.n_frame, rng).detected);
    });
    std::int64_t k = 0;
    for (auto h : hits) k += h;
    const double c = wilson_center(k, trials), hw = wilson_half_width(k, trials);
    const bool in = std::fabs(c - pfa) <= hw;
    ok = ok && in;
    d += fmt("M=%d rate=%.5f CI=[%.5f,%.5f]; ", m, double(k) / trials, c - hw, c + hw);
  }
  return {ok, d};
}

// C2: discovery MC vs closed form over a 6-point beamwidth grid at 10 and 30 dB
Verdict discovery_fidelity() {
  bool ok = true;
  std::string d;
  for (double snr_db : {10.0, 30.0}) {
    ScenarioConfig cfg;
    // snr = 4 N_f P |b0|^4 / sigma2
    cfg.detector.p_tx = std::pow(10.0, snr_db / 10.0) * cfg.detector.sigma2 /
                        (4.0 * n_s_frame(cfg) * std::pow(cfg.channel.beta0_abs, 4));
    const AnalyticModel model = AnalyticModel::make(cfg);
    double worst = 0.0;
    for (double td : log_grid(theta_min_bm(cfg), cfg.channel.omega, 6)) {
      const auto e = run_discovery_mc(cfg, td, 10000, 202);
      worst = std::max(worst, std::fabs(double(e.p_d_hat) - double(model.p_d(td))));
    }
    ok = ok && worst <= 0.03;
    d += fmt("%gdB max|MC-an|=%.4f; ", snr_db, worst);
    if (snr_db == 10.0) {
      const auto fine = log_grid(theta_min_bm(cfg), cfg.channel.omega, 64);
      std::vector<double> pd;
      for (double td : fine) pd.push_back(model.p_d(td));
      const auto im = std::max_element(pd.begin(), pd.end()) - pd.begin();
      const bool interior = im > 0 && im < static_cast<std::ptrdiff_t>(pd.size()) - 1;
      ok = ok && interior;
      d += fmt("argmax theta_d=%.3f (%s); ", fine[static_cast<std::size_t>(im)], interior ? "interior" : "endpoint");
    }
  }
  return {ok, d};
}

double energy_at(const CVec& a, const Pulse& p, double dt, Truncation tr) {
  return (isi_matrix(dt, p, static_cast<int>(a.size()), tr) * a).squaredNorm();
}

// C3: flat energy across offsets, baselines worse at a half-symbol offset
Verdict waveform_robustness() {
  bool ok = true;
  std::string d;
  for (PulseKind kind : {PulseKind::sinc, PulseKind::rrc}) {
    ScenarioConfig cfg;
    cfg.waveform.pulse.kind = kind;
    const TagDesign t = make_tag(cfg, {303, 0});
    const auto prof = energy_profile(t.alpha, t.pulse, 64, cfg.waveform.truncate);
    double lo = 1e300, hi = 0.0;
    for (const auto& [dt, e] : prof) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double e_des = energy_at(t.alpha, t.pulse, 0.5, cfg.waveform.truncate);
    Rng rng(RngStream{303, 1});
    const double e_rand = energy_at(random_tag(cfg.waveform.n_s, rng), t.pulse, 0.5, cfg.waveform.truncate);
    const double e_proj = energy_at(projection_only_tag(t.clutter_basis, rng), t.pulse, 0.5, cfg.waveform.truncate);
    const bool k_ok = lo / hi >= 0.85 && e_rand < e_des && e_proj < e_des;
    ok = ok && k_ok;
    d += fmt("%s min/max=%.4f E(0.5) designed=%.4f random=%.4f proj=%.4f; ", kind == PulseKind::sinc ? "sinc" : "rrc",
             lo / hi, e_des, e_rand, e_proj);
  }
  return {ok, d};
}

// C4: Rayleigh-quotient optimality against random feasible vectors
Verdict waveform_optimality() {
  bool ok = true;
  std::string d;
  for (int n : {16, 64}) {
    ScenarioConfig cfg;
    cfg.waveform.n_s = n;
    const Pulse p = Pulse::from(cfg.waveform.pulse);
    const CMat m = avg_energy_matrix(p, n, cfg.waveform.grid_points, cfg.waveform.truncate);
    const CMat u = default_clutter_basis(n, cfg.waveform.clutter_columns);
    const TagDesign t = design_tag(m, u, p);
    Rng rng(RngStream{404, static_cast<std::uint64_t>(n)});
    double best_rand = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const CVec v = projection_only_tag(u, rng);
      best_rand = std::max(best_rand, (v.adjoint() * m * v)(0).real());
    }
    const double resid = (u.adjoint() * t.alpha).norm();
    ok = ok && best_rand <= t.lambda_alpha && resid <= 1e-10;
    d += fmt("Ns=%d lambda=%.6f best_random=%.6f residual=%.1e; ", n, t.lambda_alpha, best_rand, resid);
  }
  return {ok, d};
}

// C5: alignment MC vs closed form in the moderate regime, and the array-size trend
Verdict alignment_fidelity() {
  bool ok = true;
  double worst = 0.0;
  int points = 0;
  for (double kappa : {0.5, 1.0, 2.0, 4.0}) {
    for (double ta : {0.125, 0.25, 0.5}) {
      for (double td : {0.5, 1.0, 2.0}) {
        ScenarioConfig cfg;
        cfg.channel.kappa = kappa;
        const AlignParams p = AlignParams::from(cfg, ta, td);
        const double e = eta(p);
        if (e < 1.0 || e > 6.0 || beam_count(cfg.channel.omega, ta) > 16) continue;
        const auto est = run_alignment_mc(cfg, ta, td, 10000, 505);
        worst = std::max(worst, std::fabs(double(est.p_out_hat) - double(pout_analytic(p))));
        ++points;
      }
    }
  }
  ok = ok && points > 0 && worst <= 0.05;
  std::string d = fmt("moderate grid %d points max|MC-an|=%.4f; ", points, worst);

  ScenarioConfig cfg;
  cfg.channel.kappa = 0.5;
  double prev = -1.0;
  bool nondecreasing = true;
  d += "kappa=0.5 P_out(M=8,16,32,64)=";
  for (int m : {8, 16, 32, 64}) {
    cfg.arrays.m_ant = m;
    const auto est = run_alignment_mc(cfg, 2.0 / m, 0.25, 10000, 506);
    const double v = est.p_out_hat;
    nondecreasing = nondecreasing && v >= prev;
    prev = v;
    d += fmt("%.4f ", v);
  }
  ok = ok && nondecreasing;
  return {ok, d};
}

// C6: retro-directive pattern has no grating lobe at quarter-wavelength spacing
Verdict retro_uniqueness() {
  const int n = 32, grid = 4096;
  double worst_q = -1e300, worst_h = -1e300;
  for (int i = 0; i < 256; ++i) {
    const double aoa = -1.0 + (i + 0.5) / 128.0;
    const CVec uq = steering_vector(n, aoa, 0.25, Propagation::round_trip).conjugate();
    const CVec uh = steering_vector(n, aoa, 0.5, Propagation::round_trip).conjugate();
    worst_q = std::max(worst_q, measured_mainlobe(uq, Propagation::round_trip, grid, 0.25).secondary_peak_db);
    worst_h = std::max(worst_h, measured_mainlobe(uh, Propagation::round_trip, grid, 0.5).secondary_peak_db);
  }
  return {worst_q < -3.0 && worst_h >= -3.0,
          fmt("lambda/4 worst secondary=%.2f dB; lambda/2 worst secondary=%.2f dB", worst_q, worst_h)};
}

// C7: measured width and peak against the spoiling law, both ends
Verdict codebook_width_law() {
  bool ok = true;
  std::string d;
  const int n = 32, grid = 8192;
  const double tmin = 2.0 / n;
  for (double r : {1.0, 2.0, 4.0, 8.0}) {
    const double th = r * tmin;
    const Codebook bs = build_bs_codebook(th, 2.0, n);
    const Codebook bm = build_bm_codebook(th, 2.0, n, 0.25);
    const auto& wb = bs.codewords[static_cast<std::size_t>(bs.count() / 2)];
    const auto& wm = bm.codewords[static_cast<std::size_t>(bm.count() / 2)];
    const Mainlobe lb = measured_mainlobe(wb, Propagation::one_way, grid, 0.5);
    const Mainlobe lm = measured_mainlobe(wm, Propagation::round_trip, grid, 0.25);
    const WidthGain pb = predicted_width_gain(bs.spoiling, tmin, n);
    const WidthGain pm = predicted_width_gain(bm.spoiling, tmin, n);
    const double wr_b = lb.width / pb.theta, gr_b = lb.peak_gain / pb.gain;
    const double wr_m = lm.width / pm.theta, gr_m = lm.peak_gain / pm.gain;
    auto within = [](double x) { return std::fabs(x - 1.0) <= 0.2; };
    ok = ok && within(wr_b) && within(gr_b) && within(wr_m) && within(gr_m);
    d += fmt("r=%g BS width/law=%.3f peak/law=%.3f BM width/law=%.3f peak/law=%.3f; ", r, wr_b, gr_b, wr_m, gr_m);
  }
  return {ok, d};
}

// C8: end-to-end MC vs the factorized closed form, plus the renewal sum
Verdict e2e_fidelity() {
  bool ok = true;
  std::string d;
  const ScenarioConfig cfg;
  const AnalyticModel model = AnalyticModel::make(cfg);
  for (auto [td, ta] : {std::pair{0.25, 0.25}, std::pair{0.5, 0.5}, std::pair{1.0, 1.0}}) {
    const auto e = run_e2e_mc(cfg, td, ta, 10000, 808);
    const double an = model.p_e2e(td, ta);
    const double gap = std::fabs(double(e.p_e2e_hat) - an);
    ok = ok && gap <= 0.05;
    d += fmt("(td=%g,ta=%g) MC=%.4f an=%.4f gap=%.4f; ", td, ta, double(e.p_e2e_hat), an, gap);
  }
  double worst = 0.0;
  for (double p : {0.01, 0.2, 0.7, 0.99}) {
    for (double ta : {0.0625, 0.25, 1.0}) {
      const Timing& t = model.timing;
      const double tal = t_align(ta, t, cfg.channel.omega);
      double sum = 0.0;
      for (int n = 1; n <= 10000; ++n) sum += std::pow(1.0 - p, n - 1) * p * std::exp(-t.mu * (n * t.t_frame + tal));
      worst = std::max(worst, std::fabs(sum - double(p_trig_analytic(p, ta, t, cfg.channel.omega))));
    }
  }
  ok = ok && worst <= 1e-12;
  d += fmt("renewal partial-sum max diff=%.1e", worst);
  return {ok, d};
}

// C9: asymptotic rule vs exact envelope on the default scenario
Verdict design_law() {
  ScenarioConfig cfg;
  cfg.protocol.split = BudgetSplit::optimized;
  const auto ex = solve_design_law(cfg, DesignMode::exact_envelope);
  const auto as = solve_design_law(cfg, DesignMode::asymptotic);
  ScenarioConfig sym = cfg;
  sym.protocol.split = BudgetSplit::symmetric;
  const auto as_sym = solve_design_law(sym, DesignMode::asymptotic);
  if (!ex.feasible || !as.feasible) return {false, fmt("exact feasible=%d asymptotic feasible=%d", ex.feasible, as.feasible)};
  const auto i = static_cast<std::size_t>(ex.index);
  const double psi = ex.envelope[i].psi;
  const double psi_prev = i > 0 ? ex.envelope[i - 1].psi : -1.0;
  const bool step = std::abs(ex.index - as.index) <= 1;
  const bool edge = psi >= cfg.protocol.p_req && (i == 0 || psi_prev < cfg.protocol.p_req);
  return {step && edge,
          fmt("exact theta_a*=%.4f (idx %d, Psi=%.4f, Psi_prev=%.4f); asymptotic theta_a*=%.4f (idx %d, p_trig budget %.4f); "
              "symmetric split would give idx %d",
              ex.theta_a_star, ex.index, psi, psi_prev, as.theta_a_star, as.index, as.p_trig_budget, as_sym.index)};
}

// C10: reflection modulation enlarges the feasible region under strong clutter
Verdict gated_quality_region() {
  std::vector<double> scr, ik;
  for (int i = 0; i < 8; ++i) {
    scr.push_back(-30.0 + 5.0 * i);
    ik.push_back(-20.0 + 5.0 * i);
  }
  const ScenarioConfig cfg;
  const auto on = gated_quality(cfg, scr, ik, true);
  const auto off = gated_quality(cfg, scr, ik, false);
  int on_n = 0, off_n = 0, extra = 0;
  bool contained = true;
  for (std::size_t k = 0; k < on.size(); ++k) {
    if (on[k].scr_db > -10.0) continue;
    on_n += on[k].feasible;
    off_n += off[k].feasible;
    if (off[k].feasible && !on[k].feasible) contained = false;
    if (on[k].feasible && !off[k].feasible) ++extra;
  }
  return {contained && extra >= 1,
          fmt("SCR<=-10dB cells: enabled %d, disabled %d, extra %d, disabled subset of enabled: %s", on_n, off_n, extra,
              contained ? "yes" : "no")};
}

// C11: special functions against quadrature
Verdict special_functions() {
  std::mt19937_64 g(1111);
  std::uniform_real_distribution<double> ua(0.5, 60.0), ux(0.0, 1.0), am(0.1, 10.0), bm(0.0, 25.0);
  double wg = 0.0, wq = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = ua(g), x = ux(g) * (3.0 * a + 10.0);
    wg = std::max(wg, std::fabs(double(reg_upper_gamma(a, x)) - oracle::upper_gamma_quad(a, x)));
    const int m = 1 + static_cast<int>(g() % 40);
    const double aa = am(g), bb = bm(g);
    wq = std::max(wq, std::fabs(double(marcum_q(m, aa, bb)) - oracle::marcum_quad(m, aa, bb)));
  }
  return {wg <= 1e-8 && wq <= 1e-8, fmt("reg_upper_gamma max err=%.1e, marcum_q max err=%.1e", wg, wq)};
}

}  // namespace

int main() {
  std::printf("workers=%d\n", worker_count());
  run(1, "CFAR calibration", 60, cfar_calibration);
  run(2, "discovery closed-form fidelity", 300, discovery_fidelity);
  run(3, "waveform timing robustness", 30, waveform_robustness);
  run(4, "waveform optimality", 30, waveform_optimality);
  run(5, "alignment closed-form fidelity", 600, alignment_fidelity);
  run(6, "retro-directive uniqueness", 10, retro_uniqueness);
  run(7, "codebook width law", 10, codebook_width_law);
  run(8, "end-to-end factorization", 600, e2e_fidelity);
  run(9, "design law", 120, design_law);
  run(10, "gated lock quality", 900, gated_quality_region);
  run(11, "special functions", 10, special_functions);
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
