#include "ldplab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <unordered_set>

#include "ldplab/errors.hpp"
#include "ldplab/hash.hpp"

namespace ldplab {

const char* attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::RPA: return "rpa";
    case AttackKind::RIA: return "ria";
    case AttackKind::MGA: return "mga";
  }
  return "unknown";
}

uint64_t beta_to_m(double beta, uint64_t n) {
  if (!(beta >= 0.0) || beta >= 1.0)
    fail(ErrorCode::Parameter, "beta must lie in [0, 1)");
  return static_cast<uint64_t>(
      std::llround(beta * static_cast<double>(n) / (1.0 - beta)));
}

namespace {

void check_targets(const ProtocolSpec& spec,
                   const std::vector<uint32_t>& targets) {
  if (targets.empty())
    fail(ErrorCode::Parameter, "attack needs a nonempty target set");
  std::unordered_set<uint32_t> seen;
  for (uint32_t t : targets) {
    if (t < 1 || t > spec.d)
      fail(ErrorCode::Parameter, "attack target outside the domain");
    if (!seen.insert(t).second)
      fail(ErrorCode::Parameter, "attack targets must be distinct");
  }
}

// Best (value, covered-target count) for one OLH seed, ties broken toward
// the smaller value. O(r^2) pairwise counting avoids allocating per-seed
// bucket arrays, which matters because the seed search runs per fake user.
struct SeedScore {
  uint32_t value;
  uint32_t covered;
};

SeedScore score_seed(uint64_t seed, const std::vector<uint32_t>& targets,
                     uint32_t d_prime, std::vector<uint32_t>& scratch) {
  scratch.clear();
  for (uint32_t t : targets) scratch.push_back(hash_eval(seed, t, d_prime));
  SeedScore best{0, 0};
  for (size_t i = 0; i < scratch.size(); ++i) {
    uint32_t count = 0;
    for (uint32_t h : scratch) count += (h == scratch[i]);
    if (count > best.covered ||
        (count == best.covered && scratch[i] < best.value)) {
      best = {scratch[i], count};
    }
  }
  return best;
}

Report mga_olh_report(const ProtocolSpec& spec,
                      const std::vector<uint32_t>& targets,
                      uint32_t hash_candidates, RngStream& rng,
                      std::vector<uint32_t>& scratch) {
  bool exhaustive = hash_candidates >= spec.seed_range;
  uint64_t attempts = exhaustive ? spec.seed_range : hash_candidates;
  uint64_t chosen_seed = 0;
  SeedScore chosen{0, 0};
  uint64_t ties = 0;
  for (uint64_t i = 0; i < attempts; ++i) {
    uint64_t seed = exhaustive ? i : rng.uniform_int(spec.seed_range);
    SeedScore score = score_seed(seed, targets, spec.d_prime, scratch);
    if (score.covered > chosen.covered) {
      chosen = score;
      chosen_seed = seed;
      ties = 1;
    } else if (score.covered == chosen.covered) {
      ++ties;
      if (rng.uniform_int(ties) == 0) {
        chosen = score;
        chosen_seed = seed;
      }
    }
  }
  Report report;
  report.kind = ProtocolKind::OLH;
  report.seed = static_cast<uint32_t>(chosen_seed);
  report.value = chosen.value;
  return report;
}

}  // namespace

FakeReportBatch rpa(const ProtocolSpec& spec, uint64_t m, RngStream& rng) {
  FakeReportBatch batch;
  batch.reports.reserve(m);
  for (uint64_t i = 0; i < m; ++i) {
    Report report;
    report.kind = spec.kind;
    switch (spec.kind) {
      case ProtocolKind::KRR:
        report.item = static_cast<uint32_t>(rng.uniform_int(spec.d)) + 1;
        break;
      case ProtocolKind::OUE:
        report.bits.assign(words_for_bits(spec.d), 0);
        for (uint32_t v = 0; v < spec.d; ++v)
          if (rng.bernoulli(0.5)) set_bit(report.bits, v);
        break;
      case ProtocolKind::OLH:
        report.seed = static_cast<uint32_t>(rng.uniform_int(spec.seed_range));
        report.value =
            static_cast<uint32_t>(rng.uniform_int(spec.d_prime)) + 1;
        break;
    }
    batch.reports.push_back(std::move(report));
  }
  return batch;
}

FakeReportBatch ria(const ProtocolSpec& spec,
                    const std::vector<uint32_t>& targets, uint64_t m,
                    RngStream& rng) {
  check_targets(spec, targets);
  FakeReportBatch batch;
  batch.reports.reserve(m);
  for (uint64_t i = 0; i < m; ++i) {
    uint32_t target = targets[rng.uniform_int(targets.size())];
    batch.reports.push_back(perturb(spec, target, rng));
  }
  return batch;
}

FakeReportBatch mga(const ProtocolSpec& spec,
                    const std::vector<uint32_t>& targets, uint64_t m,
                    uint32_t hash_candidates, RngStream& rng) {
  check_targets(spec, targets);
  uint32_t r = static_cast<uint32_t>(targets.size());
  FakeReportBatch batch;
  batch.reports.reserve(m);

  switch (spec.kind) {
    case ProtocolKind::KRR:
      for (uint64_t i = 0; i < m; ++i) {
        Report report;
        report.kind = ProtocolKind::KRR;
        report.item = targets[rng.uniform_int(r)];
        batch.reports.push_back(std::move(report));
      }
      break;

    case ProtocolKind::OUE: {
      double expected_ones =
          spec.p + (static_cast<double>(spec.d) - 1.0) * spec.q;
      int64_t padding =
          static_cast<int64_t>(std::floor(expected_ones)) - static_cast<int64_t>(r);
      if (padding < 0) {
        std::cerr << "warning: target count " << r
                  << " exceeds the expected report weight " << expected_ones
                  << "; padding clamped to zero\n";
        padding = 0;
      }
      uint64_t l = static_cast<uint64_t>(padding);

      std::vector<uint32_t> non_targets;
      non_targets.reserve(spec.d - r);
      std::unordered_set<uint32_t> target_set(targets.begin(), targets.end());
      for (uint32_t v = 1; v <= spec.d; ++v)
        if (!target_set.count(v)) non_targets.push_back(v);
      if (l > non_targets.size())
        fail(ErrorCode::Parameter,
             "padding exceeds the number of non-target items");

      std::vector<uint32_t> pool = non_targets;
      for (uint64_t i = 0; i < m; ++i) {
        Report report;
        report.kind = ProtocolKind::OUE;
        report.bits.assign(words_for_bits(spec.d), 0);
        for (uint32_t t : targets) set_bit(report.bits, t - 1);
        // Partial Fisher-Yates draw of l distinct non-target positions.
        for (uint64_t j = 0; j < l; ++j) {
          uint64_t pick = j + rng.uniform_int(pool.size() - j);
          std::swap(pool[j], pool[pick]);
          set_bit(report.bits, pool[j] - 1);
        }
        batch.reports.push_back(std::move(report));
      }
      break;
    }

    case ProtocolKind::OLH: {
      if (hash_candidates == 0)
        fail(ErrorCode::Parameter, "hash_candidates must be positive");
      std::vector<uint32_t> scratch;
      scratch.reserve(r);
      for (uint64_t i = 0; i < m; ++i)
        batch.reports.push_back(
            mga_olh_report(spec, targets, hash_candidates, rng, scratch));
      break;
    }
  }
  return batch;
}

FakeReportBatch craft_reports(const ProtocolSpec& spec,
                              const AttackConfig& attack, RngStream& rng) {
  switch (attack.kind) {
    case AttackKind::RPA: return rpa(spec, attack.m, rng);
    case AttackKind::RIA: return ria(spec, attack.targets, attack.m, rng);
    case AttackKind::MGA:
      return mga(spec, attack.targets, attack.m, attack.hash_candidates, rng);
  }
  fail(ErrorCode::Parameter, "unknown attack kind");
}

double mean_target_coverage(const ProtocolSpec& spec,
                            const FakeReportBatch& batch,
                            const std::vector<uint32_t>& targets) {
  check_targets(spec, targets);
  if (batch.reports.empty())
    fail(ErrorCode::EmptyInput, "coverage of an empty batch is undefined");
  uint64_t covered = 0;
  for (const Report& report : batch.reports) {
    validate_report(spec, report);
    for (uint32_t t : targets) {
      switch (spec.kind) {
        case ProtocolKind::KRR:
          covered += (report.item == t);
          break;
        case ProtocolKind::OUE:
          covered += get_bit(report.bits, t - 1);
          break;
        case ProtocolKind::OLH:
          covered += (hash_eval(report.seed, t, spec.d_prime) == report.value);
          break;
      }
    }
  }
  return static_cast<double>(covered) /
         static_cast<double>(batch.reports.size());
}

}  // namespace ldplab
