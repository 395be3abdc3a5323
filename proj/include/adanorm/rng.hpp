#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace adanorm {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Deterministically derives an independent seed for a sub-stream
/// (per repeat, per probe point, per sweep cell, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Counter-based generator: the k-th output is a pure function of
/// (key, k), so any draw can be reproduced without replaying the stream.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(mix64(key ^ 0x6a09e667f3bcc909ULL)), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }

  /// Output at an arbitrary counter position; does not advance the stream.
  result_type at(std::uint64_t counter) const;

  /// Uniform index in [0, n) by multiply-shift. Bias is below n / 2^64.
  std::size_t uniform_index(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Engine for instance generation (Gaussian data, initial points).
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(derive_seed(seed, stream));
}

}  // namespace adanorm
