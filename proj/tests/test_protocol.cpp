// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "bsmimo/protocol.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace bsm;

namespace {

// sum_{n>=1} (1-p)^{n-1} p exp(-mu (n T_frame + T_align)), truncated
double p_trig_partial_sum(double p, double t_align_s, double t_frame, double mu, int terms) {
  double acc = 0.0;
  for (int n = 1; n <= terms; ++n) acc += std::pow(1.0 - p, n - 1) * p * std::exp(-mu * (n * t_frame + t_align_s));
  return acc;
}

ScenarioConfig small_cfg() {
  ScenarioConfig cfg;
  cfg.arrays.m_ant = 16;
  cfg.arrays.n_bm = 16;
  cfg.waveform.n_s = 16;
  cfg.detector.p_tx = 0.05;
  return cfg;
}

}  // namespace

TEST_CASE("alignment time for eight beams") {
  const Timing t{1e-3, 1e-3, 2e-3, 1e-3, 5.0};
  CHECK(t_align(0.25, t, 2.0) == doctest::Approx(11e-3).epsilon(1e-12));
  CHECK(t_align(0.3, t, 2.0) == doctest::Approx(10e-3).epsilon(1e-12));
  CHECK(t_align(0.3, t, 2.0, BeamCount::continuous) == doctest::Approx((2.0 / 0.3 + 3.0) * 1e-3).epsilon(1e-12));
  ScenarioConfig cfg;
  cfg.timing.t_iii_mode = TiiiMode::derived;
  CHECK(Timing::from(cfg).t_iii == doctest::Approx(32 * 1e-3));
}

TEST_CASE("trigger probability matches the renewal partial sum") {
  for (double p : {0.05, 0.3, 0.9}) {
    for (double mu : {0.5, 5.0, 50.0}) {
      const Timing t{1e-3, 1e-3, 2e-3, 1e-3, mu};
      const double ref = p_trig_partial_sum(p, t_align(0.25, t, 2.0), 1e-3, mu, 10000);
      CHECK(std::fabs(double(p_trig_analytic(p, 0.25, t, 2.0)) - ref) <= 1e-12);
    }
  }
  const Timing t{1e-3, 1e-3, 2e-3, 1e-3, 5.0};
  CHECK(double(p_trig_analytic(0.0, 0.25, t, 2.0)) == 0.0);
  const Timing still{1e-3, 1e-3, 2e-3, 1e-3, 0.0};
  CHECK(double(p_trig_analytic(0.01, 0.25, still, 2.0)) == doctest::Approx(1.0));
}

TEST_CASE("trigger probability falls with the coherence rate (property)") {
  for (double p : {0.01, 0.2, 0.8}) {
    double prev = 2.0;
    for (double mu : {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const Timing t{1e-3, 1e-3, 2e-3, 1e-3, mu};
      const double v = p_trig_analytic(p, 0.25, t, 2.0);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("design bounds examples") {
  ScenarioConfig cfg;
  cfg.timing.mu = 0.0;
  // no decoherence: any detection probability reaches the budget eventually
  CHECK(design_bounds(0.25, cfg, 0.95, 0.95).theta_d_lower == doctest::Approx(0.0));
  // two beams: eta_req = -ln(1 - p_align)
  const DesignBounds b = design_bounds(1.0, cfg, 0.95, 0.9);
  CHECK(b.eta_req == doctest::Approx(-std::log(0.1)).epsilon(1e-12));
  AlignParams p = AlignParams::from(cfg, 1.0, 1.0);
  CHECK(b.theta_d_upper == doctest::Approx(eta(p) / b.eta_req).epsilon(1e-12));
  // eta at the upper bound equals the requirement
  p.theta_d = b.theta_d_upper;
  CHECK(eta(p) == doctest::Approx(b.eta_req).epsilon(1e-10));
  CHECK_THROWS_AS(design_bounds(0.25, cfg, 0.0, 0.9), std::invalid_argument);

  // unreachable trigger budget
  cfg.timing.mu = 1e4;
  CHECK(std::isinf(design_bounds(0.25, cfg, 0.99, 0.99).theta_d_lower));
  CHECK_FALSE(design_bounds(0.25, cfg, 0.99, 0.99).feasible);
}

TEST_CASE("lower bound makes the continuous trigger probability meet its budget") {
  ScenarioConfig cfg;
  const double pt = 0.95;
  const DesignBounds b = design_bounds(0.5, cfg, pt, 0.95);
  REQUIRE(std::isfinite(b.theta_d_lower));
  // with p_D = theta_d / omega (strong signal) the budget is met exactly at L
  const Timing t = Timing::from(cfg);
  const double pd = b.theta_d_lower / cfg.channel.omega;
  CHECK(double(p_trig_analytic(pd, 0.5, t, 2.0, BeamCount::continuous)) == doctest::Approx(pt).epsilon(1e-10));
}

TEST_CASE("locked link metrics") {
  const auto m = locked_link_metrics(0.25, 0.0625, 1.0, 1.0, 1.0);
  CHECK(m.rho_lock == doctest::Approx(256.0));
  CHECK(m.rate == doctest::Approx(std::log2(257.0)));
  CHECK(m.angle_var == doctest::Approx(0.0625 / 12.0));
  CHECK_THROWS_AS(locked_link_metrics(0.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("false-alarm feasible set is the whole grid") {
  const ScenarioConfig cfg;
  const auto g = log_grid(1.0 / 16, 2.0, 16);
  const Interval iv = feasible_fa_set(cfg, g);
  CHECK(iv.lo == g.front());
  CHECK(iv.hi == g.back());
}

TEST_CASE("log grid endpoints and spacing") {
  const auto g = log_grid(0.1, 10.0, 3);
  CHECK(g[0] == 0.1);
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(g[2] == 10.0);
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("certain reliability is infeasible under decoherence") {
  ScenarioConfig cfg;
  cfg.protocol.p_req = 1.0;
  cfg.protocol.grid_points = 16;
  CHECK_FALSE(solve_design_law(cfg, DesignMode::exact_envelope).feasible);
  CHECK_FALSE(solve_design_law(cfg, DesignMode::asymptotic).feasible);
}

TEST_CASE("analytic end-to-end probability factorizes") {
  const ScenarioConfig cfg;
  const AnalyticModel m = AnalyticModel::make(cfg);
  for (double td : {0.125, 0.5, 2.0}) {
    for (double ta : {0.0625, 0.25, 1.0}) {
      const double pt = p_trig_analytic(m.p_d(td), ta, m.timing, 2.0);
      const double pa = 1.0 - m.p_out(ta, td);
      CHECK(double(m.p_e2e(td, ta)) == doctest::Approx(pt * pa).epsilon(1e-14));
      CHECK(double(p_e2e_analytic(td, ta, cfg)) == doctest::Approx(pt * pa).epsilon(1e-14));
    }
  }
}

TEST_CASE("exact design point meets the requirement and is the narrowest on the grid") {
  ScenarioConfig cfg;
  cfg.protocol.grid_points = 24;
  const auto r = solve_design_law(cfg, DesignMode::exact_envelope);
  REQUIRE(r.feasible);
  CHECK(r.envelope[static_cast<std::size_t>(r.index)].psi >= cfg.protocol.p_req);
  for (int i = 0; i < r.index; ++i) CHECK(r.envelope[static_cast<std::size_t>(i)].psi < cfg.protocol.p_req);
  const AnalyticModel m = AnalyticModel::make(cfg);
  CHECK(double(m.p_e2e(r.theta_d_star, r.theta_a_star)) ==
        doctest::Approx(r.envelope[static_cast<std::size_t>(r.index)].psi).epsilon(1e-12));

  std::ostringstream os;
  write_design_law_json(os, r);
  CHECK(os.str().find("\"theta_a_star\"") != std::string::npos);
}

TEST_CASE("tag disabled adds clutter as interference") {
  ScenarioConfig cfg;
  cfg.waveform.tag = TagMode::disabled;
  const AnalyticModel m = AnalyticModel::make(cfg);
  CHECK(m.lambda_alpha == 1.0);
  CHECK(m.clutter_floor_frame > 0.0);
  ScenarioConfig on;
  CHECK(AnalyticModel::make(on).clutter_floor_frame == 0.0);
  CHECK(double(m.p_d(0.5)) < double(AnalyticModel::make(on).p_d(0.5)));
}

TEST_CASE("end-to-end Monte Carlo reproducibility") {
  const ScenarioConfig cfg = small_cfg();
  const auto a = run_e2e_mc(cfg, 0.5, 0.25, 150, 5, Exec::serial);
  const auto b = run_e2e_mc(cfg, 0.5, 0.25, 150, 5, Exec::parallel);
  CHECK(a.p_e2e_hat.value() == b.p_e2e_hat.value());
  CHECK(a.triggers == b.triggers);
  CHECK(a.successes == b.successes);
  CHECK(a.successes <= a.triggers);
  CHECK(a.episodes == 150);
}

TEST_CASE("very fast decoherence leaves no useful trigger") {
  ScenarioConfig cfg = small_cfg();
  cfg.timing.mu = 1e5;
  const auto e = run_e2e_mc(cfg, 0.5, 0.25, 100, 6);
  CHECK(e.p_e2e_hat.value() == 0.0);
  CHECK(double(p_e2e_analytic(0.5, 0.25, cfg)) < 1e-100);
}
