// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/scenario.hpp"

#include <cmath>

namespace bsm {

namespace {

void check(bool ok, const char* path, const char* msg) {
  if (!ok) throw ConfigError(path, msg);
}

bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const ScenarioConfig& c) {
  check(c.arrays.m_ant >= 1 && c.arrays.m_ant <= 4096, "arrays.m_ant", "must be in [1, 4096]");
  check(c.arrays.n_bm >= 1 && c.arrays.n_bm <= 4096, "arrays.n_bm", "must be in [1, 4096]");
  check(finite_pos(c.arrays.d_bs), "arrays.d_bs", "must be positive");
  check(finite_pos(c.arrays.d_bm), "arrays.d_bm", "must be positive");

  check(std::isfinite(c.channel.kappa) && c.channel.kappa >= 0.0, "channel.kappa", "must be nonnegative");
  check(c.channel.paths >= 0 && c.channel.paths <= 1024, "channel.paths", "must be in [0, 1024]");
  check(c.channel.scatterers >= 0 && c.channel.scatterers <= 1024, "channel.scatterers", "must be in [0, 1024]");
  check(finite_pos(c.channel.beta0_abs), "channel.beta0_abs", "must be positive");
  check(std::isfinite(c.channel.scr_db), "channel.scr_db", "must be finite");
  check(finite_pos(c.channel.omega) && c.channel.omega <= 2.0, "channel.omega", "must be in (0, 2]");

  check(c.waveform.n_s >= 2 && c.waveform.n_s <= 4096, "waveform.n_s", "must be in [2, 4096]");
  check(c.waveform.pulse.span >= 1 && c.waveform.pulse.span <= 256, "waveform.pulse.span", "must be in [1, 256]");
  check(c.waveform.pulse.rolloff >= 0.0 && c.waveform.pulse.rolloff <= 1.0, "waveform.pulse.rolloff", "must be in [0, 1]");
  check(c.waveform.clutter_columns >= 0 && c.waveform.clutter_columns < c.waveform.n_s, "waveform.clutter_columns",
        "must be in [0, n_s)");
  check(c.waveform.grid_points >= 2, "waveform.grid_points", "must be >= 2");

  check(c.detector.p_fa_sys > 0.0 && c.detector.p_fa_sys < 1.0, "detector.p_fa_sys", "must be in (0, 1)");
  check(finite_pos(c.detector.sigma2), "detector.sigma2", "must be positive");
  check(finite_pos(c.detector.p_tx), "detector.p_tx", "must be positive");
  check(finite_pos(c.detector.f_s), "detector.f_s", "must be positive");

  check(finite_pos(c.timing.t_frame), "timing.t_frame", "must be positive");
  check(finite_pos(c.timing.t_dwell), "timing.t_dwell", "must be positive");
  check(finite_pos(c.timing.t_iii), "timing.t_iii", "must be positive");
  check(finite_pos(c.timing.t_fb), "timing.t_fb", "must be positive");
  check(std::isfinite(c.timing.mu) && c.timing.mu >= 0.0, "timing.mu", "must be nonnegative");
  check(n_s_frame(c) >= 1, "timing.t_frame", "t_frame * f_s must give at least one sample");
  check(n_s_dwell(c) >= 1, "timing.t_dwell", "t_dwell * f_s must give at least one sample");

  check(c.protocol.p_req > 0.0 && c.protocol.p_req < 1.0 + 1e-15, "protocol.p_req", "must be in (0, 1]");
  if (c.protocol.p_trig_budget) {
    const double pt = *c.protocol.p_trig_budget;
    check(pt > 0.0 && pt <= 1.0 && pt >= c.protocol.p_req, "protocol.p_trig_budget", "must be in [p_req, 1]");
  }
  check(c.protocol.grid_points >= 2, "protocol.grid_points", "must be >= 2");

  check(c.mc.trials >= 1, "mc.trials", "must be >= 1");
  check(c.mc.episodes >= 1, "mc.episodes", "must be >= 1");
}

int n_s_frame(const ScenarioConfig& c) { return static_cast<int>(std::floor(c.timing.t_frame * c.detector.f_s + 1e-9)); }
int n_s_dwell(const ScenarioConfig& c) { return static_cast<int>(std::floor(c.timing.t_dwell * c.detector.f_s + 1e-9)); }
double theta_min_bs(const ScenarioConfig& c) { return 2.0 / c.arrays.m_ant; }
double theta_min_bm(const ScenarioConfig& c) { return 2.0 / c.arrays.n_bm; }

}  // namespace bsm
