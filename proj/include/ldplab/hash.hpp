#pragma once

#include <cstdint>

namespace ldplab {

// Keyed mixing hash mapping an item to a bucket in [1, d_prime]. The seed
// selects the member of the hash family; results are identical across
// platforms, which keeps every simulation reproducible.
inline uint32_t hash_eval(uint64_t seed, uint32_t item, uint32_t d_prime) {
  uint64_t z = (seed + 1) * 0x9E3779B97F4A7C15ull +
               static_cast<uint64_t>(item) * 0xD1B54A32D192ED03ull;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<uint32_t>(z % d_prime) + 1;
}

}  // namespace ldplab
