// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace bsm {

namespace {

constexpr double kRelSlack = 1e-12;

void check_width(double theta, double theta_min, double omega, const char* who) {
  if (!std::isfinite(theta) || theta < theta_min * (1.0 - kRelSlack) || theta > omega * (1.0 + kRelSlack))
    throw InfeasibleBeamwidth(std::string(who) + ": beamwidth outside [theta_min, omega]");
}

double to_db(double ratio) { return ratio > 0.0 ? 10.0 * std::log10(ratio) : -std::numeric_limits<double>::infinity(); }

}  // namespace

int Codebook::bin_of(double nu) const noexcept {
  const int k = count();
  const double pos = (nu + 0.5 * omega) / (omega / k);
  const int idx = static_cast<int>(std::ceil(pos - 1e-12)) - 1;
  return std::clamp(idx, 0, k - 1);
}

double spoiling_factor(double theta, double theta_min, int n_elem) {
  if (n_elem < 1) throw std::invalid_argument("spoiling_factor: n_elem must be >= 1");
  if (!(theta_min > 0.0)) throw std::invalid_argument("spoiling_factor: theta_min must be positive");
  if (!(theta >= theta_min * (1.0 - kRelSlack))) throw InfeasibleBeamwidth("spoiling_factor: theta below theta_min");
  const double r = std::max(theta / theta_min, 1.0);
  return std::numbers::pi / (double(n_elem) * n_elem) * std::sqrt(r * r - 1.0);
}

WidthGain predicted_width_gain(double gamma, double theta_min, int n_elem) {
  if (gamma < 0.0) throw std::invalid_argument("predicted_width_gain: gamma must be nonnegative");
  const double u = double(n_elem) * n_elem * gamma / std::numbers::pi;
  const double theta = theta_min * std::sqrt(1.0 + u * u);
  return {theta, 2.0 / theta};
}

int beam_count(double omega, double theta) {
  // tolerate representation error so that omega/theta = 8.0000000001 stays 8
  const double q = omega / theta;
  const double r = std::round(q);
  if (std::fabs(q - r) <= 1e-9 * r) return std::max(1, static_cast<int>(r));
  return std::max(1, static_cast<int>(std::ceil(q)));
}

std::vector<double> beam_centers(double omega, int count) {
  std::vector<double> c(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) c[static_cast<std::size_t>(k)] = -0.5 * omega + (k + 0.5) * omega / count;
  return c;
}

Codebook build_bs_codebook(double theta_a, double omega, int m_ant) {
  const double tmin = 2.0 / m_ant;
  check_width(theta_a, tmin, omega, "build_bs_codebook");
  Codebook cb;
  cb.kind = CodebookKind::bs_transmit;
  cb.beamwidth = theta_a;
  cb.omega = omega;
  cb.spoiling = spoiling_factor(theta_a, tmin, m_ant);
  cb.centers = beam_centers(omega, beam_count(omega, theta_a));
  const double mid = 0.5 * (m_ant - 1);
  const double norm = 1.0 / std::sqrt(double(m_ant));
  for (double nu : cb.centers) {
    CVec w(m_ant);
    for (int m = 0; m < m_ant; ++m) {
      const double d = m - mid;
      w(m) = norm * std::polar(1.0, std::numbers::pi * m * nu + cb.spoiling * d * d);
    }
    cb.codewords.push_back(std::move(w));
  }
  return cb;
}

Codebook build_bm_codebook(double theta, double omega, int n_bm, double d_bm_over_lambda) {
  const double tmin = 2.0 / n_bm;
  check_width(theta, tmin, omega, "build_bm_codebook");
  Codebook cb;
  cb.kind = CodebookKind::bm_reflect;
  cb.beamwidth = theta;
  cb.omega = omega;
  cb.spoiling = spoiling_factor(theta, tmin, n_bm);
  cb.centers = beam_centers(omega, beam_count(omega, theta));
  const double mid = 0.5 * (n_bm - 1);
  const double rate = 4.0 * std::numbers::pi * d_bm_over_lambda;
  for (double nu : cb.centers) {
    CVec u(n_bm);
    for (int n = 0; n < n_bm; ++n) {
      const double d = n - mid;
      u(n) = std::polar(1.0, rate * n * nu + cb.spoiling * d * d);
    }
    cb.codewords.push_back(std::move(u));
  }
  return cb;
}

std::vector<double> gain_pattern(const CVec& cw, Propagation mode, int grid, double spacing) {
  const int n = static_cast<int>(cw.size());
  const double energy = cw.squaredNorm();
  std::vector<double> g(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double nu = grid == 1 ? 0.0 : -1.0 + 2.0 * i / (grid - 1);
    const CVec a = steering_vector(n, nu, spacing, mode);
    g[static_cast<std::size_t>(i)] = std::norm((a.array() * cw.array()).sum()) / energy;
  }
  return g;
}

Mainlobe measured_mainlobe(const CVec& cw, Propagation mode, int grid, double spacing) {
  if (grid < 1024) throw std::invalid_argument("measured_mainlobe: grid must be >= 1024");
  std::vector<double> g = gain_pattern(cw, mode, grid, spacing);
  const double step = 2.0 / (grid - 1);

  // The response is periodic in nu with period 1/rate (rate = spacing, doubled
  // for round trip). When [-1, 1] holds a whole number of periods, nu = -1 and
  // nu = +1 are the same point and the scan is treated as circular.
  const double rate = (mode == Propagation::round_trip ? 2.0 : 1.0) * spacing;
  const bool circular = std::fabs(2.0 * rate - std::round(2.0 * rate)) < 1e-9 && std::round(2.0 * rate) >= 1.0;
  if (circular) g.pop_back();
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  auto at = [&](std::ptrdiff_t i) -> double {
    if (circular) return g[static_cast<std::size_t>(((i % n) + n) % n)];
    return (i < 0 || i >= n) ? -1.0 : g[static_cast<std::size_t>(i)];
  };

  const auto ip = static_cast<std::ptrdiff_t>(std::max_element(g.begin(), g.end()) - g.begin());
  const double peak = g[static_cast<std::size_t>(ip)];
  const double half = 0.5 * peak;
  const std::ptrdiff_t reach = circular ? n - 1 : n;

  // half-power crossings, linearly interpolated
  std::ptrdiff_t l = 0;
  while (l < reach && at(ip - l - 1) >= half) ++l;
  double left = double(l);
  if (at(ip - l - 1) >= 0.0) left += (at(ip - l) - half) / (at(ip - l) - at(ip - l - 1));
  std::ptrdiff_t r = 0;
  while (r < reach && at(ip + r + 1) >= half) ++r;
  double right = double(r);
  if (at(ip + r + 1) >= 0.0) right += (at(ip + r) - half) / (at(ip + r) - at(ip + r + 1));
  if (!circular) {
    left = std::min(left, double(ip));
    right = std::min(right, double(n - 1 - ip));
  }

  // mainlobe extends down to the first local minimum on each side
  std::ptrdiff_t lo = 0;
  while (lo < reach && at(ip - lo - 1) >= 0.0 && at(ip - lo - 1) <= at(ip - lo)) ++lo;
  std::ptrdiff_t hi = 0;
  while (hi < reach && at(ip + hi + 1) >= 0.0 && at(ip + hi + 1) <= at(ip + hi)) ++hi;
  double side = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t d = circular ? ((i - ip) % n + n) % n : i - ip;
    const bool in_lobe = circular ? (d <= hi || d >= n - lo) : (d >= -lo && d <= hi);
    if (!in_lobe) side = std::max(side, g[static_cast<std::size_t>(i)]);
  }

  return {std::min((left + right) * step, 2.0), peak, -1.0 + double(ip) * step, to_db(side / peak)};
}

void write_codebook_csv(std::ostream& os, const Codebook& cb) {
  os << "index,center,element,re,im\n";
  const auto old = os.precision(9);
  for (int k = 0; k < cb.count(); ++k) {
    const auto& c = cb.codewords[static_cast<std::size_t>(k)];
    for (Eigen::Index e = 0; e < c.size(); ++e)
      os << k << ',' << cb.centers[static_cast<std::size_t>(k)] << ',' << e << ',' << c(e).real() << ',' << c(e).imag()
         << '\n';
  }
  os.precision(old);
}

}  // namespace bsm
