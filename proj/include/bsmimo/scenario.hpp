// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace bsm {

enum class PulseKind { sinc, rrc, triangular };
enum class Window { rect, hann, blackman };
enum class Truncation { adjacent, full_span };
// Which remodulation sequence the target applies. `disabled` means no reflection
// modulation: the echo is unmodulated and indistinguishable from clutter.
enum class TagMode { designed, random, projection_only, eigen, disabled };
enum class TiiiMode { fixed, derived };
// How the asymptotic design rule splits P_req between trigger and alignment.
enum class BudgetSplit { symmetric, optimized };

struct ArraysConfig {
  int m_ant = 32;
  int n_bm = 32;
  double d_bs = 0.5;   // spacing over wavelength
  double d_bm = 0.25;
};

struct ChannelConfig {
  double kappa = 10.0;
  int paths = 8;       // P
  int scatterers = 8;  // Q
  double beta0_abs = 1.0;
  double scr_db = -20.0;
  double omega = 2.0;
};

struct PulseConfig {
  PulseKind kind = PulseKind::sinc;
  int span = 8;
  double rolloff = 0.25;
  Window window = Window::blackman;
};

struct WaveformConfig {
  int n_s = 64;
  PulseConfig pulse{};
  Truncation truncate = Truncation::full_span;
  int clutter_columns = 1;  // U_sc = first columns of the DFT basis (column 0 is all-ones)
  int grid_points = 64;
  TagMode tag = TagMode::designed;
};

struct DetectorConfig {
  double p_fa_sys = 1e-3;
  double sigma2 = 1.0;
  double p_tx = 1.0;
  double f_s = 1e5;  // samples per second
};

struct TimingConfig {
  double t_frame = 1e-3;
  double t_dwell = 1e-3;
  double t_iii = 2e-3;
  TiiiMode t_iii_mode = TiiiMode::fixed;
  double t_fb = 1e-3;
  double mu = 5.0;  // coherence rate, T_coh ~ Exp(mu)
};

struct ProtocolConfig {
  double p_req = 0.9;
  std::optional<double> p_trig_budget;  // fixed trigger budget; overrides `split`
  BudgetSplit split = BudgetSplit::symmetric;
  int grid_points = 64;
};

struct McConfig {
  std::int64_t trials = 10000;
  std::int64_t episodes = 10000;
  std::uint64_t seed = 1;
};

struct ScenarioConfig {
  ArraysConfig arrays{};
  ChannelConfig channel{};
  WaveformConfig waveform{};
  DetectorConfig detector{};
  TimingConfig timing{};
  ProtocolConfig protocol{};
  McConfig mc{};
};

struct ConfigError : std::runtime_error {
  ConfigError(std::string field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), path(std::move(field)) {}
  std::string path;
};

// Range-checks every field; throws ConfigError naming the first offending path.
void validate(const ScenarioConfig& cfg);

// N_s^f = floor(T_frame f_s)
int n_s_frame(const ScenarioConfig& cfg);
// N_s^dwell = floor(T_dwell f_s)
int n_s_dwell(const ScenarioConfig& cfg);
double theta_min_bs(const ScenarioConfig& cfg);
double theta_min_bm(const ScenarioConfig& cfg);

}  // namespace bsm
