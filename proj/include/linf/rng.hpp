#pragma once

#include <array>
#include <cstdint>

namespace linf {

// Philox4x32-10 counter-based generator.
//
// A stream is addressed by (seed, stream): the 64-bit seed is the cipher key
// and the stream id occupies the high counter words, so streams with the same
// seed are independent by construction. Draws are reproducible regardless of
// which thread executes them, which is what makes parallel Monte Carlo trials
// deterministic under any scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); safe as a log() argument.
  double uniform01();

  double normal(double mean = 0.0, double stddev = 1.0);

  // Inverse-CDF sample, lambda * (-ln u)^(1/k).
  double weibull(double lambda, double k);

  // Inversion for small rates, Hormann's transformed rejection (PTRS) above 10.
  std::uint64_t poisson(double rate);

  // One block of the keyed permutation, exposed for seed derivation.
  static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                            const std::array<std::uint32_t, 4>& counter);

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Hashes (seed, index) through one Philox block; used to derive per-trial
// sub-seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace linf
