#pragma once

#include <cstdint>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/attacks.hpp"
#include "ldplab/data.hpp"
#include "ldplab/defenses.hpp"
#include "ldplab/protocols.hpp"
#include "ldplab/rng.hpp"

namespace ldplab {

struct PemConfig {
  uint32_t k = 20;      // heavy hitters to report
  uint32_t g = 10;      // user groups, one per iteration
  uint32_t gamma = 10;  // bits per encoded item; 2^gamma >= d
  double epsilon = 1.0;
  uint64_t seed_range = uint64_t{1} << 32;
};

// Bit-string prefixes of a common length, stored as integers. The ranked
// top-k sets keep score order; candidate sets are sorted ascending.
struct PrefixSet {
  uint32_t length = 0;
  std::vector<uint32_t> prefixes;
};

void validate_config(const PemConfig& config);

// OLH parameters used in one iteration: the domain is the full space of
// lambda-bit prefixes even though support is only evaluated on candidates.
ProtocolSpec iteration_spec(const PemConfig& config, uint32_t lambda);

// Prefix length examined in iteration j (1-based).
uint32_t lambda_schedule(const PemConfig& config, uint32_t j);

// Every prefix of `prev` extended by all bit suffixes up to `new_length`,
// deduplicated and sorted.
PrefixSet extend_candidates(const PrefixSet& prev, uint32_t new_length);

struct PemIteration {
  uint32_t lambda = 0;
  std::vector<uint32_t> candidates;    // candidate prefixes, ascending
  std::vector<Report> reports;         // group reports: genuine, then fake
  size_t fake_start = 0;               // index of the first fake report
  std::vector<double> candidate_freq;  // estimate per candidate
  PrefixSet top;                       // ranked top-k prefixes after this step
  double fpr = 0.0;                    // detection stats, NaN when undefended
  double fnr = 0.0;
  uint64_t flagged = 0;
};

struct PemRun {
  PemConfig config;
  uint32_t dataset_d = 0;             // decoded items are limited to [1, dataset_d]
  std::vector<PemIteration> iterations;
  std::vector<uint32_t> top_k_items;  // decoded final ranking
  bool defended = false;
};

// Per-iteration fake reports for an attack on PEM: a fake user assigned to
// group j (group ids are 1-based, matching iteration indices) attacks
// iteration j, with the target set projected to the first lambda_j bits of
// the target items.
std::vector<FakeReportBatch> attack_pem(
    const PemConfig& config, const AttackConfig& attack,
    const std::vector<uint32_t>& group_assignment, RngStream& rng);

// Runs PEM over the dataset, optionally with an attack and per-iteration
// fake-user detection. Genuine randomness depends only on the rng seed and
// the user index, so runs with and without an attack are directly
// comparable.
PemRun run_pem(const PemConfig& config, const Dataset& dataset,
               const AttackConfig* attack, const DetectionConfig* defense,
               RngStream& rng);

// Re-resolves a recorded run with per-iteration detection: flagged reports
// are removed before each iteration's top-k selection and later iterations
// see the filtered ranking.
PemRun defend_pem(const PemRun& run, const DetectionConfig& config);

}  // namespace ldplab
