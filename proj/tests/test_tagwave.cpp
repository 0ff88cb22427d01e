// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "bsmimo/tagwave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace bsm;

namespace {

Pulse tri() { return {PulseKind::triangular, 1, 0.0, Window::rect}; }

}  // namespace

TEST_CASE("cyclic shift moves entries forward by one") {
  CVec a(4);
  a << 1.0, 2.0, 3.0, 4.0;
  const CVec b = cyclic_shift(4) * a;
  CHECK(b(0) == cd(4.0));
  CHECK(b(1) == cd(1.0));
  CHECK((cyclic_shift(4, 4) - CMat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("adjacent ISI matrix at half-symbol offset") {
  const int n = 6;
  const CMat pi1 = cyclic_shift(n);
  const CMat eye = CMat::Identity(n, n);
  CHECK((isi_matrix(0.5, tri(), n, Truncation::adjacent) - (0.5 * eye + 0.5 * pi1)).norm() < 1e-14);
  const Pulse s{PulseKind::sinc, 8, 0.0, Window::rect};
  CHECK((isi_matrix(0.5, s, n, Truncation::adjacent) - (2.0 / std::numbers::pi) * (eye + pi1)).norm() < 1e-14);
  CHECK((isi_matrix(0.0, s, n, Truncation::adjacent) - eye).norm() < 1e-14);
  CHECK_THROWS_AS(isi_matrix(1.0, s, n, Truncation::adjacent), std::domain_error);
}

TEST_CASE("averaged energy matrix for the triangular pulse") {
  // midpoint grid: mean of (1-t)^2 and t^2 is 1/3 - 1/(12 G^2), mean of t(1-t) is 1/6 + 1/(12 G^2)
  const int n = 8, g = 16;
  const double sq = 1.0 / 3.0 - 1.0 / (12.0 * g * g);
  const double cross = 1.0 / 6.0 + 1.0 / (12.0 * g * g);
  const CMat p = cyclic_shift(n);
  const CMat ref = 2.0 * sq * CMat::Identity(n, n) + cross * (p + p.adjoint());
  CHECK((avg_energy_matrix(tri(), n, g, Truncation::adjacent) - ref).norm() < 1e-13);
}

TEST_CASE("full-span matrix is circulant and matches a direct tap sum") {
  const Pulse p{PulseKind::rrc, 4, 0.3, Window::hann};
  const int n = 12;
  const double dt = 0.37;
  const CMat d = isi_matrix(dt, p, n, Truncation::full_span);
  CMat ref = CMat::Zero(n, n);
  for (int i = -4; i <= 4; ++i) ref += p.windowed(i - dt) * cyclic_shift(n, i);
  CHECK((d - ref).norm() < 1e-13);
  // effective_tag agrees with the matrix form
  Rng rng(RngStream{1, 0});
  const CVec a = random_tag(n, rng);
  CHECK((effective_tag(a, {3, dt}, p, Truncation::full_span) - cyclic_shift(n, 3) * d * a).norm() < 1e-13);
}

TEST_CASE("designed tag removes the clutter subspace and maximizes the averaged energy") {
  const Pulse p{PulseKind::sinc, 8, 0.25, Window::blackman};
  const int n = 32;
  const CMat m = avg_energy_matrix(p, n, 32, Truncation::full_span);
  for (int cols : {1, 3}) {
    const CMat u = default_clutter_basis(n, cols);
    const TagDesign t = design_tag(m, u, p);
    CHECK(t.alpha.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((u.adjoint() * t.alpha).norm() <= 1e-10);
    CHECK(t.lambda_alpha <= 1.0 + 1e-3);
    Rng rng(RngStream{2, std::uint64_t(cols)});
    for (int i = 0; i < 300; ++i) {
      const CVec v = projection_only_tag(u, rng);
      CHECK((v.adjoint() * m * v)(0).real() <= t.lambda_alpha + 1e-10);
    }
  }
}

TEST_CASE("design_tag input errors") {
  const CMat m = CMat::Identity(4, 4);
  CHECK_THROWS_AS(design_tag(CMat::Identity(4, 3), default_clutter_basis(4, 1)), ShapeError);
  CHECK_THROWS_AS(design_tag(m, CMat::Identity(4, 4)), InfeasibleDesign);
  CHECK_THROWS_AS(design_tag(m, CMat::Ones(4, 1)), std::invalid_argument);
  CHECK_THROWS_AS(default_clutter_basis(4, 4), std::invalid_argument);
}

TEST_CASE("clutter basis is orthonormal with an all-ones first column") {
  const CMat u = default_clutter_basis(16, 5);
  CHECK((u.adjoint() * u - CMat::Identity(5, 5)).norm() < 1e-13);
  CHECK((u.col(0).array() - 0.25).abs().maxCoeff() < 1e-14);
}

TEST_CASE("designed tag energy stays flat across offsets") {
  ScenarioConfig cfg;
  const TagDesign t = make_tag(cfg, {1, 0});
  const auto prof = energy_profile(t.alpha, t.pulse, 64, cfg.waveform.truncate);
  double lo = 1e9, hi = 0.0;
  for (const auto& pt : prof) {
    lo = std::min(lo, pt.second);
    hi = std::max(hi, pt.second);
  }
  // the mean over offsets is lambda_alpha
  double mean = 0.0;
  for (const auto& pt : prof) mean += pt.second;
  mean /= double(prof.size());
  CHECK(mean == doctest::Approx(t.lambda_alpha).epsilon(1e-3));
  CHECK(10.0 * std::log10(hi / lo) < 1.0);
}

TEST_CASE("make_tag baselines") {
  ScenarioConfig cfg;
  cfg.waveform.n_s = 16;
  for (TagMode mode : {TagMode::random, TagMode::projection_only, TagMode::eigen, TagMode::disabled}) {
    cfg.waveform.tag = mode;
    const TagDesign t = make_tag(cfg, {3, 0});
    CHECK(t.alpha.size() == 16);
    CHECK(t.alpha.norm() == doctest::Approx(1.0).epsilon(1e-12));
    if (mode == TagMode::projection_only) CHECK((t.clutter_basis.adjoint() * t.alpha).norm() < 1e-12);
    if (mode == TagMode::disabled) CHECK(t.clutter_basis.cols() == 0);
  }
  cfg.waveform.tag = TagMode::designed;
  const double best = make_tag(cfg, {3, 0}).lambda_alpha;
  cfg.waveform.tag = TagMode::projection_only;
  CHECK(make_tag(cfg, {3, 0}).lambda_alpha <= best + 1e-12);
}

TEST_CASE("long sinc kernel averages to nearly the identity") {
  // elementwise check; direct summation of sinc^2 over taps is 1 for an untruncated kernel
  const Pulse p{PulseKind::sinc, 32, 0.0, Window::blackman};
  const CMat m = avg_energy_matrix(p, 64, 64, Truncation::full_span);
  CHECK((m - CMat::Identity(64, 64)).cwiseAbs().maxCoeff() <= 0.05);
}
