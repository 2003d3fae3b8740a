#pragma once

#include <cstdint>

namespace ldplab {

// Deterministic splitmix64 generator. Every stochastic operation in the
// library draws from one of these; substreams are derived from a stream's
// seed rather than its position, so a run is reproducible no matter how the
// work is ordered and a user keeps the same randomness whether or not other
// users were added to the population.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double prob) { return next_double() < prob; }

  // Uniform integer in [0, bound). Rejection sampling keeps it unbiased for
  // every bound, not just powers of two.
  uint64_t uniform_int(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Independent stream addressed by up to four coordinates. Derivation uses
  // only this stream's seed, never its current position.
  RngStream substream(uint64_t tag, uint64_t a = 0, uint64_t b = 0,
                      uint64_t c = 0) const {
    uint64_t s = seed_;
    s = mix(s + 0x9E3779B97F4A7C15ull * (tag + 1));
    s = mix(s + 0x9E3779B97F4A7C15ull * (a + 1));
    s = mix(s + 0x9E3779B97F4A7C15ull * (b + 1));
    s = mix(s + 0x9E3779B97F4A7C15ull * (c + 1));
    return RngStream(s);
  }

  uint64_t seed() const { return seed_; }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  uint64_t seed_;
  uint64_t state_;
};

// Substream roles used across the library so independent phases of an
// experiment never share randomness.
namespace rng_role {
inline constexpr uint64_t kGenuineReport = 1;
inline constexpr uint64_t kFakeReport = 2;
inline constexpr uint64_t kGroupAssignment = 3;
inline constexpr uint64_t kSynthesis = 4;
inline constexpr uint64_t kTargetSelection = 5;
inline constexpr uint64_t kTrial = 6;
}  // namespace rng_role

}  // namespace ldplab
