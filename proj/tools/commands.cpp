// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "config_io.hpp"
#include "output.hpp"

#include "bsmimo/align.hpp"
#include "bsmimo/codebook.hpp"
#include "bsmimo/detect.hpp"
#include "bsmimo/parallel.hpp"
#include "bsmimo/protocol.hpp"
#include "bsmimo/tagwave.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>

namespace bsm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunContext {
  const ScenarioConfig& cfg;
  fs::path dir;
  std::string hash;
  std::vector<std::string> outputs;

  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
    outputs.push_back(name);
    return CsvWriter(dir / name, header, hash);
  }
  std::ofstream raw(const std::string& name) {
    outputs.push_back(name);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  }
};

const char* pulse_name(PulseKind k) {
  switch (k) {
    case PulseKind::sinc: return "sinc";
    case PulseKind::rrc: return "rrc";
    case PulseKind::triangular: return "triangular";
  }
  return "?";
}

double db(double v) { return 10.0 * std::log10(v); }

void cmd_design_waveform(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const int n = cfg.waveform.n_s;
  const int grid = cfg.waveform.grid_points;
  const CMat u = default_clutter_basis(n, cfg.waveform.clutter_columns);
  auto prof = rc.csv("waveform_profile.csv", {"pulse", "scheme", "delta_tau", "energy"});
  auto summ = rc.csv("waveform_summary.csv", {"pulse", "scheme", "lambda_alpha", "min_energy", "max_energy",
                                               "flatness", "energy_at_half", "clutter_residual"});
  for (PulseKind kind : {PulseKind::sinc, PulseKind::rrc}) {
    PulseConfig pc = cfg.waveform.pulse;
    pc.kind = kind;
    const Pulse pulse = Pulse::from(pc);
    const CMat m_bar = avg_energy_matrix(pulse, n, grid, cfg.waveform.truncate);
    Rng rng(RngStream{cfg.mc.seed, 0}.child(static_cast<std::uint64_t>(kind)));
    const std::vector<std::pair<std::string, CVec>> schemes = {
        {"designed", design_tag(m_bar, u, pulse).alpha},
        {"random", random_tag(n, rng)},
        {"projection_only", projection_only_tag(u, rng)},
        {"eigen", eigen_baseline_tag(m_bar)},
    };
    for (const auto& [name, alpha] : schemes) {
      const auto p = energy_profile(alpha, pulse, grid, cfg.waveform.truncate);
      double lo = p.front().second, hi = lo, half = 0.0;
      for (const auto& [dt, e] : p) {
        prof.row({pulse_name(kind), name, dt, e});
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      half = (isi_matrix(0.5, pulse, n, cfg.waveform.truncate) * alpha).squaredNorm();
      const double lam = (alpha.adjoint() * m_bar * alpha)(0).real();
      const double resid = u.cols() > 0 ? (u.adjoint() * alpha).norm() : 0.0;
      summ.row({pulse_name(kind), name, lam, lo, hi, lo / hi, half, resid});
      if (name == "designed" && resid > 1e-10)
        throw InvariantViolation("designed tag leaks into the clutter subspace (" + format_double(resid) + ")");
    }
  }
}

void cmd_codebook(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const double omega = cfg.channel.omega;
  auto width = rc.csv("codebook_width.csv", {"kind", "ratio", "theta", "spoiling", "predicted_width", "measured_width",
                                             "peak_gain", "nominal_gain", "secondary_db"});
  auto pat = rc.csv("codebook_pattern.csv", {"kind", "ratio", "nu", "gain"});
  constexpr int grid = 4096;
  for (const bool bs : {true, false}) {
    const int n = bs ? cfg.arrays.m_ant : cfg.arrays.n_bm;
    const double tmin = 2.0 / n;
    const auto mode = bs ? Propagation::one_way : Propagation::round_trip;
    const double spacing = bs ? cfg.arrays.d_bs : cfg.arrays.d_bm;
    const char* kind = bs ? "bs" : "bm";
    for (double r : {1.0, 2.0, 4.0, 8.0}) {
      const double theta = r * tmin;
      if (theta > omega) break;
      const Codebook cb = bs ? build_bs_codebook(theta, omega, n) : build_bm_codebook(theta, omega, n, cfg.arrays.d_bm);
      const CVec& cw = cb.codewords[static_cast<std::size_t>(cb.count() / 2)];
      const Mainlobe ml = measured_mainlobe(cw, mode, grid, spacing);
      const WidthGain pred = predicted_width_gain(cb.spoiling, tmin, n);
      width.row({kind, r, theta, cb.spoiling, pred.theta, ml.width, ml.peak_gain, pred.gain, ml.secondary_peak_db});
      const auto g = gain_pattern(cw, mode, 1024, spacing);
      for (std::size_t i = 0; i < g.size(); ++i) pat.row({kind, r, -1.0 + 2.0 * double(i) / 1023.0, g[i]});
    }
  }

  auto retro = rc.csv("codebook_retro.csv", {"aoa", "d_bm", "secondary_db"});
  const int nb = cfg.arrays.n_bm;
  const double rate = 4.0 * std::numbers::pi * cfg.arrays.d_bm;
  for (int i = 0; i < 256; ++i) {
    const double aoa = -1.0 + (i + 0.5) / 128.0;
    CVec u(nb);
    for (int k = 0; k < nb; ++k) u(k) = std::polar(1.0, rate * k * aoa);
    retro.row({aoa, cfg.arrays.d_bm, measured_mainlobe(u, Propagation::round_trip, grid, cfg.arrays.d_bm).secondary_peak_db});
  }

  for (const bool bs : {true, false}) {
    const Codebook cb = bs ? build_bs_codebook(theta_min_bs(cfg), omega, cfg.arrays.m_ant)
                           : build_bm_codebook(theta_min_bm(cfg), omega, cfg.arrays.n_bm, cfg.arrays.d_bm);
    auto f = rc.raw(bs ? "codebook_bs.csv" : "codebook_bm.csv");
    f << "# config_hash=" << rc.hash << '\n';
    write_codebook_csv(f, cb);
  }
}

double sensing_snr_db(const ScenarioConfig& cfg) {
  return db(4.0 * n_s_frame(cfg) * cfg.detector.p_tx * std::pow(cfg.channel.beta0_abs, 4) / cfg.detector.sigma2);
}

void cmd_discovery(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const AnalyticModel model = AnalyticModel::make(cfg);
  auto out = rc.csv("discovery.csv", {"theta_d", "snr_db", "p_d_analytic", "p_d_mc", "ci", "p_fa_mc"});
  const double snr = sensing_snr_db(cfg);
  for (double td : log_grid(theta_min_bm(cfg), cfg.channel.omega, 6)) {
    const DiscoveryEstimate e = run_discovery_mc(cfg, td, cfg.mc.trials, cfg.mc.seed);
    out.row({td, snr, double(model.p_d(td)), double(e.p_d_hat), e.ci, double(e.p_fa_hat)});
  }
}

void cmd_alignment(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const double omega = cfg.channel.omega;
  auto out = rc.csv("alignment.csv", {"m_ant", "kappa", "theta_a", "theta_d", "eta", "p_out_analytic", "p_out_mc",
                                      "ci", "phase3_mc"});
  std::vector<double> ta_grid;
  for (double t = theta_min_bs(cfg); t < omega * (1.0 - 1e-12); t *= 2.0) ta_grid.push_back(t);
  ta_grid.push_back(omega);
  const double td_grid[] = {std::min(omega, 4.0 * theta_min_bm(cfg)), 0.5 * omega};
  for (double td : td_grid) {
    for (double ta : ta_grid) {
      const AlignParams p = AlignParams::from(cfg, ta, td);
      const AlignmentEstimate e = run_alignment_mc(cfg, ta, td, cfg.mc.trials, cfg.mc.seed, Exec::parallel, true);
      out.row({std::int64_t{cfg.arrays.m_ant}, cfg.channel.kappa, ta, td, eta(p), double(pout_analytic(p)),
               double(e.p_out_hat), e.ci, double(e.phase3_hat)});
    }
  }
}

void cmd_e2e(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const double omega = cfg.channel.omega;
  const AnalyticModel model = AnalyticModel::make(cfg);
  const DesignLawResult law = solve_design_law(cfg, DesignMode::exact_envelope);
  double ta = law.theta_a_star, td = law.theta_d_star;
  if (!law.feasible) {
    // no point meets P_req; simulate the envelope maximizer instead
    const auto best = std::max_element(law.envelope.begin(), law.envelope.end(),
                                       [](const auto& a, const auto& b) { return a.psi < b.psi; });
    ta = best->theta_a;
    td = best->theta_d_best;
  }
  const E2eEstimate e = run_e2e_mc(cfg, td, ta, cfg.mc.episodes, cfg.mc.seed);
  const double pt = p_trig_analytic(model.p_d(td), ta, model.timing, omega);
  auto out = rc.csv("e2e.csv", {"theta_d", "theta_a", "p_e2e_analytic", "p_trig_analytic", "p_out_analytic",
                                "p_e2e_mc", "ci", "p_trig_mc", "p_align_given_trig_mc", "phase3_mc", "episodes"});
  out.row({td, ta, double(model.p_e2e(td, ta)), pt, double(model.p_out(ta, td)), double(e.p_e2e_hat), e.ci,
           double(e.p_trig_hat), double(e.p_align_given_trig_hat), double(e.phase3_hat), e.episodes});

  auto heat = rc.csv("e2e_heatmap.csv", {"theta_d", "theta_a", "p_e2e", "p_trig", "p_out"});
  const auto tds = log_grid(theta_min_bm(cfg), omega, 16);
  const auto tas = log_grid(theta_min_bs(cfg), omega, 16);
  for (double d : tds) {
    const double pd = model.p_d(d);
    for (double a : tas) {
      const double trig = p_trig_analytic(pd, a, model.timing, omega);
      const double po = model.p_out(a, d);
      heat.row({d, a, trig * (1.0 - po), trig, po});
    }
  }
}

void cmd_design_law(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const DesignLawResult ex = solve_design_law(cfg, DesignMode::exact_envelope);
  const DesignLawResult as = solve_design_law(cfg, DesignMode::asymptotic);
  if (as.feasible) {
    const double hi = std::min(cfg.channel.omega, as.theta_d_upper);
    if (!(as.theta_d_lower <= as.theta_d_star * (1.0 + 1e-12) && as.theta_d_star <= hi * (1.0 + 1e-12)))
      throw InvariantViolation("asymptotic design point lies outside [theta_d_lower, min(omega, theta_d_upper)]");
  }
  {
    auto f = rc.raw("design_law_exact.json");
    write_design_law_json(f, ex);
  }
  {
    auto f = rc.raw("design_law_asymptotic.json");
    write_design_law_json(f, as);
  }
  auto env = rc.csv("design_law_envelope.csv", {"theta_a", "psi", "theta_d_best", "theta_d_lower", "theta_d_upper",
                                                "eta_req", "bounds_feasible"});
  for (std::size_t i = 0; i < ex.envelope.size(); ++i) {
    const auto& e = ex.envelope[i];
    const auto& b = as.bounds[i];
    env.row({e.theta_a, e.psi, e.theta_d_best, b.theta_d_lower, b.theta_d_upper, b.eta_req,
             std::int64_t{b.feasible ? 1 : 0}});
  }
}

void cmd_gated_quality(RunContext& rc) {
  const auto& cfg = rc.cfg;
  std::vector<double> scr, ik;
  for (int i = 0; i < 8; ++i) {
    scr.push_back(-30.0 + 5.0 * i);
    ik.push_back(-20.0 + 5.0 * i);
  }
  auto out = rc.csv("gated_quality.csv", {"tag", "scr_db", "inv_kappa_db", "rho_eff_db", "feasible", "theta_a_star",
                                          "theta_d_star"});
  for (const bool on : {true, false}) {
    for (const auto& c : gated_quality(cfg, scr, ik, on))
      out.row({on ? "enabled" : "disabled", c.scr_db, c.inv_kappa_db, c.rho_eff_db, std::int64_t{c.feasible ? 1 : 0},
               c.theta_a_star, c.theta_d_star});
  }
}

using Handler = std::function<void(RunContext&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"design-waveform", cmd_design_waveform}, {"codebook", cmd_codebook}, {"discovery", cmd_discovery},
      {"alignment", cmd_alignment},             {"e2e", cmd_e2e},           {"design-law", cmd_design_law},
      {"gated-quality", cmd_gated_quality},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"design-waveform", "codebook",   "discovery",    "alignment",
                                                 "e2e",             "design-law", "gated-quality"};
  return names;
}

RunManifest run_subcommand(const std::string& name, const ScenarioConfig& base, const std::vector<std::string>& overrides,
                           const fs::path& out_dir) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw UnknownSubcommand("unknown subcommand '" + name + "'");
  const ScenarioConfig cfg = apply_overrides(base, overrides);
  validate(cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw std::runtime_error("cannot create output directory " + out_dir.string());

  const auto t0 = std::chrono::steady_clock::now();
  RunContext rc{cfg, out_dir, config_hash(cfg), {}};
  save_config(cfg, out_dir / "config.json");
  it->second(rc);

  RunManifest m;
  m.config_hash = rc.hash;
  m.seed = cfg.mc.seed;
  m.subcommand = name;
  m.outputs = rc.outputs;
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.tool_version = tool_version;

  json j = {{"config_hash", m.config_hash}, {"seed", m.seed},
            {"subcommand", m.subcommand},   {"outputs", m.outputs},
            {"wall_time_s", m.wall_time_s}, {"tool_version", m.tool_version},
            {"workers", worker_count()}};
  std::ofstream f(out_dir / "manifest.json");
  if (!f) throw std::runtime_error("cannot write manifest.json");
  f << j.dump(2) << '\n';
  return m;
}

}  // namespace bsm::cli
