// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/channel.hpp"
#include "bsmimo/specfun.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace bsm {

struct InfeasibleBeamwidth : std::domain_error {
  using std::domain_error::domain_error;
};

enum class CodebookKind { bs_transmit, bm_reflect };

struct Codebook {
  CodebookKind kind = CodebookKind::bs_transmit;
  double beamwidth = 0.0;
  double omega = 2.0;
  double spoiling = 0.0;  // gamma (BS) or xi (reflection)
  std::vector<double> centers;
  std::vector<CVec> codewords;

  [[nodiscard]] int count() const noexcept { return static_cast<int>(codewords.size()); }
  // Index of the tiling bin containing nu; a point on a bin edge goes to the lower bin.
  [[nodiscard]] int bin_of(double nu) const noexcept;
};

// (pi / n^2) sqrt((theta/theta_min)^2 - 1)
double spoiling_factor(double theta, double theta_min, int n_elem);

struct WidthGain {
  double theta;
  double gain;
};
WidthGain predicted_width_gain(double gamma, double theta_min, int n_elem);

int beam_count(double omega, double theta);
std::vector<double> beam_centers(double omega, int count);

Codebook build_bs_codebook(double theta_a, double omega, int m_ant);
// d_bm_over_lambda sets the round-trip phase rate 4 pi d n nu_l (pi n nu_l at lambda/4).
Codebook build_bm_codebook(double theta, double omega, int n_bm, double d_bm_over_lambda = 0.25);

struct Mainlobe {
  double width;
  double peak_gain;
  double peak_nu;
  double secondary_peak_db;
};

// Gain pattern over nu in [-1,1]: |a^T w|^2 / ||w||^2 for one-way, |sum u_n b_n|^2 / ||u||^2 for round trip.
std::vector<double> gain_pattern(const CVec& codeword, Propagation mode, int grid, double spacing_over_lambda);

Mainlobe measured_mainlobe(const CVec& codeword, Propagation mode, int grid, double spacing_over_lambda);

void write_codebook_csv(std::ostream& os, const Codebook& cb);

}  // namespace bsm
