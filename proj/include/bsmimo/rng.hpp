// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/specfun.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace bsm {

// xoshiro256** state seeded from SplitMix64 over (seed, stream). Satisfies
// UniformRandomBitGenerator so std distributions can draw from it.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  Xoshiro256(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Identifies one reproducible draw sequence. Value type, cheap to copy.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Child stream for a sub-purpose (e.g. the paired noise-only trial).
  [[nodiscard]] RngStream child(std::uint64_t tag) const noexcept;
};

class Rng {
 public:
  explicit Rng(RngStream s) noexcept : eng_(s.seed, s.stream_id) {}

  double uniform() noexcept;                      // [0, 1)
  double uniform(double lo, double hi) noexcept;  // [lo, hi)
  std::uint64_t below(std::uint64_t n) noexcept;  // [0, n)
  double normal() noexcept;                       // N(0, 1)
  cd cgauss(double variance) noexcept;            // CN(0, variance)
  cd unit_phase() noexcept;                       // e^{j U[0,2pi)}
  double exponential(double rate) noexcept;

  Xoshiro256& engine() noexcept { return eng_; }

 private:
  Xoshiro256 eng_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

CVec sample_cgauss(int n, double variance, Rng& rng);
CVec sample_cgauss(int n, double variance, RngStream stream);

}  // namespace bsm
