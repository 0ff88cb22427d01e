// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/parallel.hpp"
#include "bsmimo/scenario.hpp"
#include "bsmimo/specfun.hpp"
#include "bsmimo/tagwave.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>

namespace bsm {

struct DetectorSetup {
  ProbValue p_fa_sys{1e-3};
  double sigma2 = 1.0;
  int n_s_frame = 100;
  double p_tx = 1.0;

  static DetectorSetup from(const ScenarioConfig& cfg);
};

struct DetectionOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool detected = false;
  CVec r;
};

struct DegenerateSymbol : std::domain_error {
  using std::domain_error::domain_error;
};

// T_th with Gamma(M, T_th/sigma2)/Gamma(M) = p_fa
double cfar_threshold(int m_ant, double sigma2, double p_fa);

// Equalize column n by x[n], project each antenna's sample sequence onto the
// complement of span(clutter_basis), correlate with the unit-norm template.
DetectionOutcome matched_filter(const CMat& y, const CVec& x, const CVec& templ, const CMat& clutter_basis,
                                double threshold);
// Correlates against tag.alpha directly.
DetectionOutcome matched_filter(const CMat& y, const CVec& x, const TagDesign& tag, double threshold);

enum class PdMode { averaged_exact, optimized_approx };

// averaged_exact averages the Marcum term over `energies` (||alpha~(dtau)||^2 per
// grid offset); optimized_approx uses lambda_alpha in the noncentrality.
ProbValue pd_analytic(double theta_d, const DetectorSetup& det, cd beta0, double omega, double lambda_alpha, int m_ant,
                      PdMode mode, std::span<const double> energies = {});

// Noncentrality 4 N P |b0|^4 lambda / (sigma2 theta_d)
double rho_bar(double theta_d, const DetectorSetup& det, double beta0_abs, double lambda_alpha);

struct DiscoveryEstimate {
  ProbValue p_d_hat;
  ProbValue p_fa_hat;
  double ci = 0.0;     // Wilson 95% half-width for p_d_hat
  double ci_fa = 0.0;  // same for p_fa_hat
  std::int64_t trials = 0;
};

double wilson_half_width(std::int64_t successes, std::int64_t n, double z = 1.959963984540054);
double wilson_center(std::int64_t successes, std::int64_t n, double z = 1.959963984540054);

DiscoveryEstimate run_discovery_mc(const ScenarioConfig& cfg, double theta_d, std::int64_t trials, std::uint64_t seed,
                                   Exec exec = Exec::parallel);

}  // namespace bsm
