// SPDX-License-Identifier: Apache-2.0
#include "bsmimo/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bsm {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t sm = seed;
  const std::uint64_t a = splitmix64(sm);
  sm = stream ^ 0x6a09e667f3bcc909ULL;
  const std::uint64_t b = splitmix64(sm);
  std::uint64_t key = a ^ rotl(b, 17) ^ (b * 0x9e3779b97f4a7c15ULL);
  for (auto& w : s_) w = splitmix64(key);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

RngStream RngStream::child(std::uint64_t tag) const noexcept {
  std::uint64_t x = stream_id ^ (tag * 0xd1b54a32d192ed03ULL);
  return {seed ^ splitmix64(x), stream_id};
}

double Rng::uniform() noexcept { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

double Rng::uniform(double lo, double hi) noexcept { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

std::uint64_t Rng::below(std::uint64_t n) noexcept { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_); }

double Rng::normal() noexcept { return normal_(eng_); }

cd Rng::cgauss(double variance) noexcept {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

cd Rng::unit_phase() noexcept { return std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)); }

double Rng::exponential(double rate) noexcept { return std::exponential_distribution<double>(rate)(eng_); }

CVec sample_cgauss(int n, double variance, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_cgauss: n must be >= 1");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw std::invalid_argument("sample_cgauss: variance must be positive");
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.cgauss(variance);
  return v;
}

CVec sample_cgauss(int n, double variance, RngStream stream) {
  Rng rng(stream);
  return sample_cgauss(n, variance, rng);
}

}  // namespace bsm
