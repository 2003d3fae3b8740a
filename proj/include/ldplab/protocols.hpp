#pragma once

#include <cstdint>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/rng.hpp"

namespace ldplab {

enum class ProtocolKind { KRR, OUE, OLH };

const char* protocol_name(ProtocolKind kind);

struct ProtocolSpec {
  ProtocolKind kind;
  double epsilon = 1.0;
  uint32_t d = 0;        // domain size; items are 1-indexed in [1, d]
  uint32_t d_prime = 0;  // OLH hash range, 0 for other protocols
  double p = 0.0;        // probability a report supports the user's own item
  double q = 0.0;        // probability a report supports any other item
  double p_prime = 0.0;  // OLH inner keep probability, 0 otherwise
  double q_prime = 0.0;  // OLH inner switch probability, 0 otherwise
  uint64_t seed_range = uint64_t{1} << 32;  // OLH hash seeds live in [0, seed_range)
};

ProtocolSpec derive_params(ProtocolKind kind, double epsilon, uint32_t d);

// One user's perturbed report. Only the fields for `kind` are meaningful:
// KRR carries `item`, OUE carries `bits` (bit v-1 set means item v is
// reported), OLH carries the hash seed and the perturbed bucket value.
struct Report {
  ProtocolKind kind;
  uint32_t item = 0;
  std::vector<uint64_t> bits;
  uint32_t seed = 0;
  uint32_t value = 0;
};

struct FrequencyEstimate {
  std::vector<double> values;  // values[v - 1] estimates the frequency of item v

  double of(uint32_t item) const { return values[item - 1]; }
  uint32_t d() const { return static_cast<uint32_t>(values.size()); }
};

inline size_t words_for_bits(uint32_t d) {
  return (static_cast<size_t>(d) + 63) / 64;
}

inline bool get_bit(const std::vector<uint64_t>& words, uint32_t pos) {
  return (words[pos >> 6] >> (pos & 63)) & 1;
}

inline void set_bit(std::vector<uint64_t>& words, uint32_t pos) {
  words[pos >> 6] |= uint64_t{1} << (pos & 63);
}

// Throws a protocol error when the report is malformed for `spec` (wrong
// kind, item or value out of range, bit vector of the wrong width).
void validate_report(const ProtocolSpec& spec, const Report& report);

Report perturb(const ProtocolSpec& spec, uint32_t item, RngStream& rng);

// Set of items the report supports, ascending.
std::vector<uint32_t> support(const ProtocolSpec& spec, const Report& report);

// counts[v - 1] = number of reports supporting item v.
std::vector<uint64_t> support_counts(const ProtocolSpec& spec,
                                     const std::vector<Report>& reports);

FrequencyEstimate aggregate_from_counts(const ProtocolSpec& spec,
                                        const std::vector<uint64_t>& counts,
                                        uint64_t n_total);

// Unbiased frequency estimates from `reports`, debiased with `n_total` as the
// population size. Callers that removed reports (for example after fake-user
// detection) pass the post-removal count.
FrequencyEstimate aggregate(const ProtocolSpec& spec,
                            const std::vector<Report>& reports,
                            uint64_t n_total);

}  // namespace ldplab
