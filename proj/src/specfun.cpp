// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <string>

namespace bsm {

namespace {

std::atomic<std::uint64_t> g_clamps{0};

constexpr double kClampSlack = 1e-9;
constexpr double kTailTol = 1e-13;
// Beyond this Poisson mean the two-sided sum gets too long to be worth it.
constexpr double kMaxPoissonMean = 1e9;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

ProbValue::ProbValue(double v) {
  if (std::isnan(v)) throw std::domain_error("probability is NaN");
  if (v < -kClampSlack || v > 1.0 + kClampSlack) {
    if (g_clamps.fetch_add(1) == 0)
      std::fprintf(stderr, "bsmimo: probability %.3e clamped to [0,1]\n", v);
  }
  v_ = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

std::uint64_t clamp_diagnostics() noexcept { return g_clamps.load(); }

ProbValue reg_upper_gamma(double shape, double x) {
  require_finite(shape, "shape");
  require_finite(x, "x");
  if (shape <= 0.0) throw std::invalid_argument("shape must be positive");
  if (x < 0.0) throw std::invalid_argument("x must be nonnegative");
  if (x == 0.0) return ProbValue(1.0);
  return ProbValue(boost::math::gamma_q(shape, x));
}

// Q_M(a,b) = sum_k Pois(k; a^2/2) * Q(M+k, b^2/2), with Q the regularized upper
// gamma. The sum starts at the Poisson mode and walks both ways using
//   Q(s+1, y) = Q(s, y) + t(s),  t(s) = y^s e^{-y} / Gamma(s+1).
ProbValue marcum_q(int order, double a, double b) {
  require_finite(a, "a");
  require_finite(b, "b");
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("a and b must be nonnegative");
  if (b == 0.0) return ProbValue(1.0);

  const double x = 0.5 * a * a;
  const double y = 0.5 * b * b;
  const double m = order;
  if (x == 0.0) return reg_upper_gamma(m, y);
  if (x > kMaxPoissonMean) {
    // Q_M >= Q_1 and 1 - Q_1(a,b) <= Phi(b - a); at a - b >= 10 this is below 1e-23.
    if (a - b >= 10.0) return ProbValue(1.0);
    throw std::range_error("marcum_q: noncentrality too large for series evaluation");
  }

  const double k0 = std::floor(x);
  const double log_w0 = k0 * std::log(x) - x - std::lgamma(k0 + 1.0);
  const double w0 = std::exp(log_w0);
  const double q0 = boost::math::gamma_q(m + k0, y);
  // t(m + k0) = y^{m+k0} e^{-y} / Gamma(m+k0+1)
  const double t0 = boost::math::gamma_p_derivative(m + k0 + 1.0, y);

  double sum = w0 * q0;

  // forward: k = k0+1, k0+2, ...
  {
    double w = w0, q = q0, t = t0;
    for (double k = k0 + 1.0;; k += 1.0) {
      w *= x / k;
      q += t;
      t *= y / (m + k);
      sum += w * q;
      const double r = x / (k + 1.0);
      if (r < 1.0 && w * r / (1.0 - r) < kTailTol) break;
      if (w == 0.0) break;
    }
  }
  // backward: k = k0-1, ..., 0
  {
    double w = w0, q = q0, t = t0;
    for (double k = k0; k >= 1.0; k -= 1.0) {
      // t(s-1) = t(s) * s / y with s = m + k
      t *= (m + k) / y;
      q -= t;
      if (q < 0.0) q = 0.0;
      w *= k / x;
      sum += w * q;
      // remaining weights shrink at least by (k-1)/x; Q decreases as k does
      const double r = (k - 1.0) / x;
      if (r < 1.0 && w * q * r / (1.0 - r) < kTailTol) break;
      if (w == 0.0 || q == 0.0) break;
    }
  }
  return ProbValue(sum);
}

double solve_threshold(double target, const std::function<double(double)>& fn, Bracket bracket) {
  require_finite(target, "target");
  if (!(bracket.lo < bracket.hi)) throw BracketError("bracket must satisfy lo < hi");
  const double flo = fn(bracket.lo) - target;
  const double fhi = fn(bracket.hi) - target;
  if (flo == 0.0) return bracket.lo;
  if (fhi == 0.0) return bracket.hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw BracketError("target not bracketed");

  auto g = [&](double v) { return fn(v) - target; };
  std::uintmax_t iters = 400;
  auto tol = [](double lo, double hi) { return std::fabs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(lo); };
  auto [lo, hi] = boost::math::tools::toms748_solve(g, bracket.lo, bracket.hi, flo, fhi, tol, iters);
  const double glo = std::fabs(g(lo));
  const double ghi = std::fabs(g(hi));
  return glo <= ghi ? lo : hi;
}

EigPair principal_eigpair(const CMat& a) {
  if (a.rows() != a.cols()) throw ShapeError("principal_eigpair: matrix must be square");
  if (a.rows() == 0) throw ShapeError("principal_eigpair: empty matrix");
  const CMat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("principal_eigpair: eigensolver failed");
  const Eigen::Index top = h.rows() - 1;
  CVec v = es.eigenvectors().col(top);
  v.normalize();
  return {es.eigenvalues()(top), std::move(v)};
}

}  // namespace bsm
