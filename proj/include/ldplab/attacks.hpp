#pragma once

#include <cstdint>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/protocols.hpp"
#include "ldplab/rng.hpp"

namespace ldplab {

enum class AttackKind { RPA, RIA, MGA };

const char* attack_name(AttackKind kind);

struct AttackConfig {
  AttackKind kind = AttackKind::MGA;
  std::vector<uint32_t> targets;   // distinct items in [1, d]
  uint64_t m = 0;                  // number of fake users
  uint32_t hash_candidates = 1000; // MGA seed-search budget for OLH
};

struct FakeReportBatch {
  std::vector<Report> reports;
};

// Fake-user count m with m / (n + m) = beta.
uint64_t beta_to_m(double beta, uint64_t n);

// Random perturbed-value attack: each fake report is a uniform point of the
// protocol's encoded space.
FakeReportBatch rpa(const ProtocolSpec& spec, uint64_t m, RngStream& rng);

// Random item attack: each fake user picks a uniform target item and
// perturbs it honestly.
FakeReportBatch ria(const ProtocolSpec& spec,
                    const std::vector<uint32_t>& targets, uint64_t m,
                    RngStream& rng);

// Maximal gain attack: each fake report maximizes the number of supported
// target items. For OLH each fake user searches `hash_candidates` sampled
// seeds (or the whole seed range when the budget covers it) for the seed
// whose best hash value covers the most targets.
FakeReportBatch mga(const ProtocolSpec& spec,
                    const std::vector<uint32_t>& targets, uint64_t m,
                    uint32_t hash_candidates, RngStream& rng);

FakeReportBatch craft_reports(const ProtocolSpec& spec,
                              const AttackConfig& attack, RngStream& rng);

// Mean over reports of the number of targets the report supports. For OLH
// this is the number of targets hashed to the reported value.
double mean_target_coverage(const ProtocolSpec& spec,
                            const FakeReportBatch& batch,
                            const std::vector<uint32_t>& targets);

}  // namespace ldplab
