#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/protocols.hpp"

namespace ldplab {

enum class DefenseMode { None, Normalize, Detect, Both };

const char* defense_name(DefenseMode mode);

struct DetectionConfig {
  double eta = 0.01;              // false-positive budget per abnormal call
  uint32_t max_itemset_size = 12; // largest itemset size the miner explores
  uint64_t base_support = 0;      // explicit mining floor; 0 selects the
                                  // population-fraction floor below
  double base_support_fraction = 0.045;
};

struct ItemsetSupport {
  std::vector<uint32_t> items;  // ascending
  uint64_t support = 0;
};

struct DetectionOutcome {
  std::vector<ItemsetSupport> abnormal_itemsets;
  std::vector<size_t> flagged_users;  // ascending indices into the report list
  // Populated only when ground-truth labels are supplied, NaN otherwise.
  double fpr = 0.0;
  double fnr = 0.0;
};

struct NormalizeResult {
  FrequencyEstimate estimate;
  bool degenerate = false;  // all inputs equal; output fell back to uniform
};

// Calibrates estimates to a probability distribution by shifting to the
// minimum and rescaling. Rank order is preserved.
NormalizeResult normalize(const FrequencyEstimate& estimate);

struct IndicatorVectors {
  uint32_t d = 0;
  std::vector<std::vector<uint64_t>> rows;  // packed d-bit vector per user
};

// Per-user support indicators: OUE reports are taken bit for bit; an OLH
// report sets bit v exactly when the report's seed hashes v to the report's
// value. kRR reports carry too little structure and are refused.
IndicatorVectors build_indicator_vectors(const ProtocolSpec& spec,
                                         const std::vector<Report>& reports);

// Complete level-wise miner: returns every itemset of size <= max_size whose
// all-ones support reaches base_support, with exact support counts, ordered
// by size then lexicographically.
std::vector<ItemsetSupport> mine_frequent_itemsets(
    const IndicatorVectors& vectors, uint64_t base_support, uint32_t max_size);

// Smallest integer threshold above which a size-z itemset's support among
// n_total honest OUE reports is implausible at level eta, via Chebyshev's
// inequality on the support count.
uint64_t oue_threshold(uint64_t n_total, const ProtocolSpec& spec, uint32_t z,
                       double eta);

// OLH analogue via the exact binomial tail: smallest tau with
// Pr[Binomial(n_total, q^(z-1)) >= tau] <= eta.
uint64_t olh_threshold(uint64_t n_total, const ProtocolSpec& spec, uint32_t z,
                       double eta);

using ThresholdFn = std::function<uint64_t(uint32_t z)>;

// Shared detection core: mines itemsets from prebuilt indicator vectors,
// marks those meeting the size-specific threshold abnormal, and flags the
// supporters of the maximal abnormal itemsets. The maximal restriction keeps
// honest users who merely share a sub-pattern with the attack out of the
// flag set.
DetectionOutcome detect_from_vectors(
    const IndicatorVectors& vectors, const ThresholdFn& threshold,
    const DetectionConfig& config,
    const std::vector<uint8_t>* ground_truth_fake = nullptr);

// End-to-end detection for OUE and OLH report lists. FPR and FNR are filled
// when ground-truth fake labels (one per report) are given.
DetectionOutcome detect_fake_users(
    const ProtocolSpec& spec, const std::vector<Report>& reports,
    const DetectionConfig& config,
    const std::vector<uint8_t>* ground_truth_fake = nullptr);

}  // namespace ldplab
