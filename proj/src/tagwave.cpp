// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/tagwave.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace bsm {

namespace {

constexpr double pi = std::numbers::pi;

double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(pi * t) / (pi * t); }

double rrc(double t, double beta) {
  if (beta == 0.0) return sinc(t);
  if (t == 0.0) return 1.0 - beta + 4.0 * beta / pi;
  const double edge = 1.0 / (4.0 * beta);
  if (std::fabs(std::fabs(t) - edge) < 1e-12) {
    return beta / std::sqrt(2.0) *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
  }
  const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
  const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
  return num / den;
}

double window_value(Window w, double x) {
  // x in [-1, 1]
  if (std::fabs(x) >= 1.0) return 0.0;
  switch (w) {
    case Window::rect: return 1.0;
    case Window::hann: return 0.5 + 0.5 * std::cos(pi * x);
    case Window::blackman: return 0.42 + 0.5 * std::cos(pi * x) + 0.08 * std::cos(2.0 * pi * x);
  }
  return 1.0;
}

}  // namespace

double Pulse::raw(double t) const {
  switch (kind) {
    case PulseKind::sinc: return sinc(t);
    case PulseKind::rrc: return rrc(t, rolloff);
    case PulseKind::triangular: return std::fabs(t) < 1.0 ? 1.0 - std::fabs(t) : 0.0;
  }
  return 0.0;
}

double Pulse::windowed(double t) const {
  if (kind == PulseKind::triangular) return raw(t);
  return raw(t) * window_value(window, t / (span_symbols + 1.0));
}

CMat cyclic_shift(int n_s, int k) {
  CMat p = CMat::Zero(n_s, n_s);
  for (int n = 0; n < n_s; ++n) p(((n + k) % n_s + n_s) % n_s, n) = 1.0;
  return p;
}

std::vector<double> isi_taps(double delta_tau, const Pulse& pulse, int n_s, Truncation truncate) {
  if (!(delta_tau >= 0.0 && delta_tau < 1.0)) throw std::domain_error("isi_matrix: delta_tau must be in [0,1)");
  if (n_s < 1) throw std::invalid_argument("isi_matrix: n_s must be >= 1");
  std::vector<double> lag(static_cast<std::size_t>(n_s), 0.0);
  auto add = [&](int i, double v) { lag[static_cast<std::size_t>(((i % n_s) + n_s) % n_s)] += v; };
  if (truncate == Truncation::adjacent) {
    add(0, pulse.raw(-delta_tau));
    add(1, pulse.raw(1.0 - delta_tau));
  } else {
    for (int i = -pulse.span_symbols; i <= pulse.span_symbols; ++i) add(i, pulse.windowed(i - delta_tau));
  }
  return lag;
}

CMat isi_matrix(double delta_tau, const Pulse& pulse, int n_s, Truncation truncate) {
  const auto lag = isi_taps(delta_tau, pulse, n_s, truncate);
  CMat d(n_s, n_s);
  for (int c = 0; c < n_s; ++c)
    for (int r = 0; r < n_s; ++r) d(r, c) = lag[static_cast<std::size_t>(((r - c) % n_s + n_s) % n_s)];
  return d;
}

CMat avg_energy_matrix(const Pulse& pulse, int n_s, int grid_points, Truncation truncate) {
  if (grid_points < 2) throw std::invalid_argument("avg_energy_matrix: grid_points must be >= 2");
  CMat m = CMat::Zero(n_s, n_s);
  for (int g = 0; g < grid_points; ++g) {
    const CMat d = isi_matrix((g + 0.5) / grid_points, pulse, n_s, truncate);
    m.noalias() += d.adjoint() * d;
  }
  m /= double(grid_points);
  return 0.5 * (m + m.adjoint());
}

CMat default_clutter_basis(int n_s, int columns) {
  if (columns < 0 || columns >= n_s) throw std::invalid_argument("default_clutter_basis: columns must be in [0, n_s)");
  CMat u(n_s, columns);
  // DFT frequencies 0, +1, -1, +2, -2, ...
  for (int c = 0; c < columns; ++c) {
    const int f = (c % 2 == 1) ? (c + 1) / 2 : -(c / 2);
    for (int n = 0; n < n_s; ++n) u(n, c) = std::polar(1.0 / std::sqrt(double(n_s)), 2.0 * pi * f * n / n_s);
  }
  return u;
}

TagDesign design_tag(const CMat& m_bar, const CMat& u, const Pulse& pulse) {
  const Eigen::Index n = m_bar.rows();
  if (m_bar.cols() != n) throw ShapeError("design_tag: m_bar must be square");
  if (u.rows() != n && u.cols() != 0) throw ShapeError("design_tag: clutter basis row count must equal N_s");
  if (u.cols() >= n) throw InfeasibleDesign("design_tag: clutter basis spans the whole sequence space");
  if (u.cols() > 0) {
    const CMat gram = u.adjoint() * u;
    if ((gram - CMat::Identity(u.cols(), u.cols())).norm() > 1e-10)
      throw std::invalid_argument("design_tag: clutter basis columns must be orthonormal");
  }
  CMat proj = CMat::Identity(n, n);
  if (u.cols() > 0) proj -= u * u.adjoint();
  const CMat a = proj * m_bar * proj;
  auto [lam, v] = principal_eigpair(a);
  (void)lam;
  // strip round-off leakage into span(U_sc)
  CVec alpha = proj * v;
  alpha.normalize();
  TagDesign t;
  t.alpha = std::move(alpha);
  t.lambda_alpha = (t.alpha.adjoint() * m_bar * t.alpha)(0).real();
  t.clutter_basis = u;
  t.pulse = pulse;
  return t;
}

CVec effective_tag(const CVec& alpha, AsyncOffset off, const Pulse& pulse, Truncation truncate) {
  const int n = static_cast<int>(alpha.size());
  if (off.k_int < 0 || off.k_int >= n) throw std::domain_error("effective_tag: k_int must be in [0, N_s)");
  const auto lag = isi_taps(off.delta_tau, pulse, n, truncate);
  CVec out = CVec::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double g = lag[static_cast<std::size_t>(j)];
    if (g == 0.0) continue;
    // out[(i + j + k) mod n] += g alpha[i]
    const int shift = (j + off.k_int) % n;
    for (int i = 0; i < n; ++i) out((i + shift) % n) += g * alpha(i);
  }
  return out;
}

std::vector<std::pair<double, double>> energy_profile(const CVec& alpha, const Pulse& pulse, int grid, Truncation truncate) {
  if (grid < 2) throw std::invalid_argument("energy_profile: grid must be >= 2");
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(grid));
  const int n = static_cast<int>(alpha.size());
  for (int g = 0; g < grid; ++g) {
    const double dt = double(g) / grid;
    out.emplace_back(dt, (isi_matrix(dt, pulse, n, truncate) * alpha).squaredNorm());
  }
  return out;
}

CVec random_tag(int n_s, Rng& rng) {
  CVec v = sample_cgauss(n_s, 1.0, rng);
  v.normalize();
  return v;
}

CVec projection_only_tag(const CMat& u, Rng& rng) {
  CVec v = sample_cgauss(static_cast<int>(u.rows()), 1.0, rng);
  if (u.cols() > 0) v -= u * (u.adjoint() * v);
  v.normalize();
  return v;
}

CVec eigen_baseline_tag(const CMat& m_bar) { return principal_eigpair(m_bar).vector; }

TagDesign make_tag(const ScenarioConfig& cfg, RngStream stream) {
  const auto& wf = cfg.waveform;
  const Pulse pulse = Pulse::from(wf.pulse);
  const CMat u = default_clutter_basis(wf.n_s, wf.clutter_columns);
  const CMat m_bar = avg_energy_matrix(pulse, wf.n_s, wf.grid_points, wf.truncate);
  if (wf.tag == TagMode::designed) return design_tag(m_bar, u, pulse);

  Rng rng(stream);
  TagDesign t;
  t.clutter_basis = u;
  t.pulse = pulse;
  switch (wf.tag) {
    case TagMode::random: t.alpha = random_tag(wf.n_s, rng); break;
    case TagMode::projection_only: t.alpha = projection_only_tag(u, rng); break;
    case TagMode::eigen: t.alpha = eigen_baseline_tag(m_bar); break;
    case TagMode::disabled:
      t.alpha = CVec::Constant(wf.n_s, 1.0 / std::sqrt(double(wf.n_s)));
      t.clutter_basis = CMat(wf.n_s, 0);
      break;
    case TagMode::designed: break;
  }
  t.lambda_alpha = (t.alpha.adjoint() * m_bar * t.alpha)(0).real();
  return t;
}

void write_profile_csv(std::ostream& os, const std::vector<std::pair<double, double>>& profile, const std::string& label,
                       bool header) {
  if (header) os << "delta_tau,energy,scheme\n";
  const auto old = os.precision(9);
  for (const auto& [dt, e] : profile) os << dt << ',' << e << ',' << label << '\n';
  os.precision(old);
}

}  // namespace bsm
