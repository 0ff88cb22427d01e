// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/rng.hpp"
#include "bsmimo/scenario.hpp"
#include "bsmimo/specfun.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bsm {

struct Pulse {
  PulseKind kind = PulseKind::sinc;
  int span_symbols = 8;
  double rolloff = 0.25;
  Window window = Window::blackman;

  static Pulse from(const PulseConfig& pc) { return {pc.kind, pc.span, pc.rolloff, pc.window}; }

  // g(t T_s) without truncation window
  [[nodiscard]] double raw(double t) const;
  // g(t T_s) times the truncation window over |t| < span + 1 (sinc and rrc only)
  [[nodiscard]] double windowed(double t) const;
};

struct AsyncOffset {
  int k_int = 0;
  double delta_tau = 0.0;
};

struct TagDesign {
  CVec alpha;
  double lambda_alpha = 0.0;
  CMat clutter_basis;  // N_s x r, orthonormal columns
  Pulse pulse;
};

struct InfeasibleDesign : std::domain_error {
  using std::domain_error::domain_error;
};

// Cyclic shift: (Pi a)[n] = a[n-1]
CMat cyclic_shift(int n_s, int k = 1);

// First column of the circulant D(dtau): entry j sums g(i - dtau) over taps i = j mod N_s.
std::vector<double> isi_taps(double delta_tau, const Pulse& pulse, int n_s, Truncation truncate);

// D(dtau) = sum_i g(i - dtau) Pi^i
CMat isi_matrix(double delta_tau, const Pulse& pulse, int n_s, Truncation truncate);

// (1/G) sum_g D^H D over the midpoint grid dtau_g = (g + 1/2)/G
CMat avg_energy_matrix(const Pulse& pulse, int n_s, int grid_points, Truncation truncate);

// First `columns` DFT basis vectors (column 0 is the normalized all-ones vector).
CMat default_clutter_basis(int n_s, int columns = 1);

TagDesign design_tag(const CMat& m_bar, const CMat& clutter_basis, const Pulse& pulse = {});

// Pi^k D(dtau) alpha
CVec effective_tag(const CVec& alpha, AsyncOffset offset, const Pulse& pulse, Truncation truncate);

std::vector<std::pair<double, double>> energy_profile(const CVec& alpha, const Pulse& pulse, int grid, Truncation truncate);

// Baselines
CVec random_tag(int n_s, Rng& rng);
CVec projection_only_tag(const CMat& clutter_basis, Rng& rng);
CVec eigen_baseline_tag(const CMat& m_bar);

// Builds the remodulation sequence selected by cfg.waveform.tag. For `disabled`
// the tag is the all-ones unmodulated sequence normalized to unit norm.
TagDesign make_tag(const ScenarioConfig& cfg, RngStream stream);

void write_profile_csv(std::ostream& os, const std::vector<std::pair<double, double>>& profile, const std::string& label,
                       bool header);

}  // namespace bsm
