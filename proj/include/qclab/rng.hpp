#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "qclab/rational.hpp"

namespace qclab {

/// Deterministic seeded random source.  All draws avoid
/// std::uniform_int_distribution (implementation-defined) so that identical
/// seeds give identical streams on every platform.  Substreams indexed by a
/// task number make batched work order-independent.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(mix(seed)) {}

  static Rng substream(uint64_t master, uint64_t index) {
    return Rng(mix(master + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, n), unbiased via masked rejection.  n > 0.
  uint64_t below(uint64_t n) {
    if (n == 0) throw DomainError("Rng::below(0)");
    if (n == 1) return 0;
    uint64_t mask = ~uint64_t{0} >> std::countl_zero(n - 1);
    for (;;) {
      uint64_t v = eng_() & mask;
      if (v < n) return v;
    }
  }

  /// Uniform in [0, n) for arbitrary-precision n > 0.
  BigInt below_big(const BigInt& n) {
    if (n <= 0) throw DomainError("Rng::below_big: nonpositive bound");
    if (n == 1) return 0;
    const unsigned bits = static_cast<unsigned>(msb(BigInt(n - 1))) + 1;
    const unsigned words = (bits + 63) / 64;
    for (;;) {
      BigInt v = 0;
      for (unsigned w = 0; w < words; ++w) {
        v <<= 64;
        v |= BigInt(eng_());
      }
      v >>= (words * 64 - bits);
      if (v < n) return v;
    }
  }

  /// True with probability exactly p (0 <= p <= 1).
  bool bernoulli(const Rat& p) {
    if (p < 0 || p > 1) throw DomainError("Rng::bernoulli: p outside [0,1]");
    if (p == 0) return false;
    if (p == 1) return true;
    return below_big(denominator(p)) < numerator(p);
  }

  /// Index drawn proportionally to the (nonnegative, not all zero) weights.
  size_t categorical(const std::vector<Rat>& weights) {
    BigInt lcm_den = 1;
    for (const Rat& w : weights) {
      if (w < 0) throw DomainError("Rng::categorical: negative weight");
      lcm_den = lcm(lcm_den, denominator(w));
    }
    BigInt total = 0;
    std::vector<BigInt> scaled(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) {
      scaled[i] = numerator(weights[i]) * (lcm_den / denominator(weights[i]));
      total += scaled[i];
    }
    if (total == 0) throw DomainError("Rng::categorical: all weights zero");
    BigInt u = below_big(total);
    for (size_t i = 0; i < scaled.size(); ++i) {
      if (u < scaled[i]) return i;
      u -= scaled[i];
    }
    throw DefectError("Rng::categorical fell through");
  }

 private:
  static uint64_t mix(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
};

}  // namespace qclab
