// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace bsm {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Probability in [0,1]. Construction clamps; clamping by more than 1e-9 bumps
// a global diagnostic counter and logs once to stderr.
class ProbValue {
 public:
  ProbValue() = default;
  explicit ProbValue(double v);

  [[nodiscard]] double value() const noexcept { return v_; }
  operator double() const noexcept { return v_; }  // NOLINT(google-explicit-constructor)

 private:
  double v_ = 0.0;
};

// Number of clamps that exceeded the 1e-9 slack since process start.
std::uint64_t clamp_diagnostics() noexcept;

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Gamma(a, x) / Gamma(a).
ProbValue reg_upper_gamma(double shape, double x);

// Generalized Marcum Q_M(a, b).
ProbValue marcum_q(int order, double a, double b);

// Root of fn(x) = target on a bracket where fn is monotone.
struct Bracket {
  double lo;
  double hi;
};
double solve_threshold(double target, const std::function<double(double)>& fn, Bracket bracket);

struct EigPair {
  double value;
  CVec vector;
};

// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
EigPair principal_eigpair(const CMat& a);

}  // namespace bsm
