// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/align.hpp"
#include "bsmimo/detect.hpp"
#include "bsmimo/parallel.hpp"
#include "bsmimo/scenario.hpp"
#include "bsmimo/specfun.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace bsm {

struct Timing {
  double t_frame = 1e-3;
  double t_dwell = 1e-3;
  double t_iii = 2e-3;
  double t_fb = 1e-3;
  double mu = 5.0;

  // With TiiiMode::derived, t_iii becomes L(theta_min^BM) * t_dwell.
  static Timing from(const ScenarioConfig& cfg);
};

// K(theta_a) T_dwell + T_III + T_fb
double t_align(double theta_a, const Timing& timing, double omega, BeamCount count = BeamCount::ceiling);

// p_D e^{-mu (T_align + T_frame)} / (1 - (1 - p_D) e^{-mu T_frame})
ProbValue p_trig_analytic(double p_d, double theta_a, const Timing& timing, double omega,
                          BeamCount count = BeamCount::ceiling);

// Configuration-derived quantities shared by every analytic evaluation.
struct AnalyticModel {
  ScenarioConfig cfg;
  DetectorSetup det;
  Timing timing;
  double lambda_alpha = 1.0;
  // Extra per-antenna interference added to sigma2 (clutter treated as noise
  // when reflection modulation is disabled).
  double clutter_floor_frame = 0.0;
  double clutter_floor_dwell = 0.0;

  static AnalyticModel make(const ScenarioConfig& cfg);
  // Reuses lambda_alpha; only the channel/detector/timing fields are refreshed.
  static AnalyticModel make(const ScenarioConfig& cfg, double lambda_alpha);

  [[nodiscard]] ProbValue p_d(double theta_d) const;
  [[nodiscard]] AlignParams align_params(double theta_a, double theta_d) const;
  [[nodiscard]] ProbValue p_out(double theta_a, double theta_d) const;
  [[nodiscard]] ProbValue p_e2e(double theta_d, double theta_a) const;
};

ProbValue p_e2e_analytic(double theta_d, double theta_a, const ScenarioConfig& cfg);

struct E2eEstimate {
  ProbValue p_e2e_hat;
  ProbValue p_trig_hat;
  ProbValue p_align_given_trig_hat;
  ProbValue phase3_hat;  // Phase-III correctness among useful triggers
  double ci = 0.0;       // Wilson 95% half-width for p_e2e_hat
  std::int64_t episodes = 0;
  std::int64_t triggers = 0;
  std::int64_t successes = 0;
};

E2eEstimate run_e2e_mc(const ScenarioConfig& cfg, double theta_d, double theta_a, std::int64_t episodes,
                       std::uint64_t seed, Exec exec = Exec::parallel);

struct DesignBounds {
  double theta_d_lower = 0.0;  // +inf when the trigger budget is unreachable
  double theta_d_upper = 0.0;
  double eta_req = 0.0;
  bool feasible = false;
};

DesignBounds design_bounds(double theta_a, const ScenarioConfig& cfg, double p_trig_budget, double p_align_budget);

struct Interval {
  double lo;
  double hi;
};

// Default beamwidths whose CFAR false-alarm rate meets P_FA^sys.
Interval feasible_fa_set(const ScenarioConfig& cfg, std::span<const double> theta_d_grid);

enum class DesignMode { exact_envelope, asymptotic };

struct EnvelopePoint {
  double theta_a;
  double psi;
  double theta_d_best;
};

struct DesignLawResult {
  DesignMode mode = DesignMode::exact_envelope;
  bool feasible = false;
  double theta_a_star = 0.0;
  double theta_d_star = 0.0;
  double theta_d_lower = 0.0;  // bounds at theta_a_star (or the last grid point when infeasible)
  double theta_d_upper = 0.0;
  int index = -1;  // position of theta_a_star in the theta_a grid
  std::vector<EnvelopePoint> envelope;
  std::vector<DesignBounds> bounds;  // per theta_a grid point
  double p_trig_budget = 0.0;
  double p_align_budget = 0.0;
};

std::vector<double> log_grid(double lo, double hi, int n);

DesignLawResult solve_design_law(const ScenarioConfig& cfg, std::span<const double> theta_a_grid,
                                 std::span<const double> theta_d_grid, DesignMode mode);
// Same, on the default 64-point log grids over [theta_min, omega].
DesignLawResult solve_design_law(const ScenarioConfig& cfg, DesignMode mode);

struct LockedLinkMetrics {
  double rho_lock;
  double rate;
  double angle_var;
};

LockedLinkMetrics locked_link_metrics(double theta_a, double theta_bm, double p_tx, double beta0_pow4, double sigma2);

struct GatedCell {
  double scr_db;
  double inv_kappa_db;
  bool feasible;
  double rho_eff_db;  // -inf when infeasible
  double theta_a_star;
  double theta_d_star;
};

// Reliability-gated lock quality over an (SCR, 1/kappa) grid. With
// tag_enabled = false the echo is unmodulated, so clutter cannot be projected
// out and enters as Gaussian interference.
std::vector<GatedCell> gated_quality(const ScenarioConfig& cfg, std::span<const double> scr_db,
                                     std::span<const double> inv_kappa_db, bool tag_enabled);

void write_design_law_json(std::ostream& os, const DesignLawResult& r);

}  // namespace bsm
