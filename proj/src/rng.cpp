#include "linf/rng.hpp"

#include <cmath>
#include <numbers>

#include "linf/errors.hpp"

namespace linf {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kPhiloxW0;
  key[1] += kPhiloxW1;
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) philox_round(ctr, key);
  return ctr;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(seed), stream_(stream) {}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t seed,
                                               const std::array<std::uint32_t, 4>& counter) {
  return philox10(counter, {std::uint32_t(seed), std::uint32_t(seed >> 32)});
}

void CounterRng::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      std::uint32_t(block_index_), std::uint32_t(block_index_ >> 32),
      std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  buffer_ = philox10(ctr, {std::uint32_t(key_), std::uint32_t(key_ >> 32)});
  ++block_index_;
  buffer_pos_ = 0;
}

std::uint32_t CounterRng::next_u32() {
  if (buffer_pos_ >= 4) refill();
  return buffer_[buffer_pos_++];
}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double CounterRng::uniform01() {
  // 53 random bits, offset by half an ulp so 0 and 1 are both excluded.
  return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal(double mean, double stddev) {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return mean + stddev * cached_normal_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return mean + stddev * radius * std::cos(angle);
}

double CounterRng::weibull(double lambda, double k) {
  if (!(lambda > 0.0) || !(k > 0.0)) throw ParameterError("weibull: scale and shape must be > 0");
  return lambda * std::pow(-std::log(uniform01()), 1.0 / k);
}

std::uint64_t CounterRng::poisson(double rate) {
  if (rate < 0.0 || !std::isfinite(rate)) throw DomainError("poisson: rate must be finite and >= 0");
  if (rate == 0.0) return 0;
  if (rate < 10.0) {
    // Knuth inversion.
    const double threshold = std::exp(-rate);
    std::uint64_t count = 0;
    double product = uniform01();
    while (product > threshold) {
      ++count;
      product *= uniform01();
    }
    return count;
  }
  // Hormann's PTRS transformed rejection.
  const double b = 0.931 + 2.53 * std::sqrt(rate);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_rate = std::log(rate);
  for (;;) {
    const double u = uniform01() - 0.5;
    const double v = uniform01();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= v_r) return std::uint64_t(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * log_rate - rate - std::lgamma(k + 1.0)) {
      return std::uint64_t(k);
    }
  }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  const auto out = CounterRng::block(
      master_seed, {std::uint32_t(index), std::uint32_t(index >> 32), 0x5eed5eedu, 0xdecafu});
  return (std::uint64_t(out[1]) << 32) | out[0];
}

}  // namespace linf
