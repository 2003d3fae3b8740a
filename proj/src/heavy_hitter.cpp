#include "ldplab/heavy_hitter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ldplab/errors.hpp"
#include "ldplab/hash.hpp"

namespace ldplab {

namespace {

uint32_t ceil_log2(uint32_t x) {
  return x <= 1 ? 0 : std::bit_width(x - 1);
}

uint32_t prefix_item(uint32_t item, uint32_t gamma, uint32_t lambda) {
  return ((item - 1) >> (gamma - lambda)) + 1;
}

}  // namespace

void validate_config(const PemConfig& config) {
  if (config.k < 1) fail(ErrorCode::Parameter, "pem: k must be at least 1");
  if (config.g < 1) fail(ErrorCode::Parameter, "pem: g must be at least 1");
  if (config.gamma < 1 || config.gamma > 30)
    fail(ErrorCode::Parameter, "pem: gamma must lie in [1, 30]");
  if (ceil_log2(config.k) > config.gamma)
    fail(ErrorCode::Parameter, "pem: k does not fit in gamma bits");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    fail(ErrorCode::Parameter, "pem: epsilon must be positive and finite");
}

ProtocolSpec iteration_spec(const PemConfig& config, uint32_t lambda) {
  ProtocolSpec spec =
      derive_params(ProtocolKind::OLH, config.epsilon, uint32_t{1} << lambda);
  spec.seed_range = config.seed_range;
  return spec;
}

uint32_t lambda_schedule(const PemConfig& config, uint32_t j) {
  validate_config(config);
  if (j < 1 || j > config.g)
    fail(ErrorCode::Parameter, "pem: iteration index out of range");
  uint32_t low = ceil_log2(config.k);
  uint64_t span = config.gamma - low;
  uint64_t step = (static_cast<uint64_t>(j) * span + config.g - 1) / config.g;
  return low + static_cast<uint32_t>(step);
}

PrefixSet extend_candidates(const PrefixSet& prev, uint32_t new_length) {
  if (new_length < prev.length)
    fail(ErrorCode::Parameter, "extend_candidates: prefixes cannot shrink");
  if (new_length > 30)
    fail(ErrorCode::Parameter, "extend_candidates: prefix length too large");
  uint32_t shift = new_length - prev.length;
  PrefixSet out;
  out.length = new_length;
  out.prefixes.reserve(prev.prefixes.size() << shift);
  for (uint32_t prefix : prev.prefixes)
    for (uint32_t suffix = 0; suffix < (uint32_t{1} << shift); ++suffix)
      out.prefixes.push_back((prefix << shift) | suffix);
  std::sort(out.prefixes.begin(), out.prefixes.end());
  out.prefixes.erase(
      std::unique(out.prefixes.begin(), out.prefixes.end()),
      out.prefixes.end());
  return out;
}

std::vector<FakeReportBatch> attack_pem(
    const PemConfig& config, const AttackConfig& attack,
    const std::vector<uint32_t>& group_assignment, RngStream& rng) {
  validate_config(config);
  if (attack.kind != AttackKind::RPA) {
    if (attack.targets.empty())
      fail(ErrorCode::Parameter, "attack needs a nonempty target set");
    for (uint32_t t : attack.targets)
      if (t < 1 || t > (uint32_t{1} << config.gamma))
        fail(ErrorCode::Parameter, "attack target does not fit in gamma bits");
  }
  if (group_assignment.size() != attack.m)
    fail(ErrorCode::Parameter,
         "group assignment must cover every fake user");
  for (uint32_t group : group_assignment)
    if (group < 1 || group > config.g)
      fail(ErrorCode::Parameter, "group ids must lie in [1, g]");

  std::vector<FakeReportBatch> batches(config.g);
  for (uint32_t j = 1; j <= config.g; ++j) {
    uint32_t lambda = lambda_schedule(config, j);
    ProtocolSpec spec = iteration_spec(config, lambda);

    std::vector<uint32_t> iteration_targets;
    if (attack.kind != AttackKind::RPA) {
      for (uint32_t t : attack.targets)
        iteration_targets.push_back(prefix_item(t, config.gamma, lambda));
      std::sort(iteration_targets.begin(), iteration_targets.end());
      iteration_targets.erase(
          std::unique(iteration_targets.begin(), iteration_targets.end()),
          iteration_targets.end());
    }

    AttackConfig iteration_attack;
    iteration_attack.kind = attack.kind;
    iteration_attack.targets = iteration_targets;
    iteration_attack.m = 1;
    iteration_attack.hash_candidates = attack.hash_candidates;

    for (uint64_t f = 0; f < attack.m; ++f) {
      if (group_assignment[f] != j) continue;
      RngStream fake_rng = rng.substream(rng_role::kFakeReport, f);
      FakeReportBatch one =
          craft_reports(spec, iteration_attack, fake_rng);
      batches[j - 1].reports.push_back(std::move(one.reports[0]));
    }
  }
  return batches;
}

namespace {

// Recomputes candidates, per-candidate estimates, and the ranked top-k for
// every iteration, optionally removing detected reports first. Later
// iterations extend the ranking this pass produces.
void resolve_cascade(PemRun& run, const DetectionConfig* defense) {
  PrefixSet previous_top;
  previous_top.length = 0;
  previous_top.prefixes = {0};
  run.defended = defense != nullptr;

  for (PemIteration& iteration : run.iterations) {
    ProtocolSpec spec = iteration_spec(run.config, iteration.lambda);
    PrefixSet extended = extend_candidates(previous_top, iteration.lambda);
    iteration.candidates = extended.prefixes;

    std::vector<char> keep(iteration.reports.size(), 1);
    iteration.fpr = std::numeric_limits<double>::quiet_NaN();
    iteration.fnr = std::numeric_limits<double>::quiet_NaN();
    iteration.flagged = 0;
    if (defense) {
      // The defender sees every report's full preimage structure over the
      // iteration's whole prefix domain, not just the published candidate
      // set; target prefixes outside the candidates would otherwise hide
      // the fakes' shared pattern.
      IndicatorVectors vectors = build_indicator_vectors(spec, iteration.reports);
      uint64_t n_total = iteration.reports.size();
      ThresholdFn threshold = [&spec, n_total, defense](uint32_t z) {
        return olh_threshold(n_total, spec, z, defense->eta);
      };
      std::vector<uint8_t> labels(iteration.reports.size(), 0);
      for (size_t u = iteration.fake_start; u < labels.size(); ++u)
        labels[u] = 1;
      DetectionOutcome outcome =
          detect_from_vectors(vectors, threshold, *defense, &labels);
      for (size_t u : outcome.flagged_users) keep[u] = 0;
      iteration.fpr = outcome.fpr;
      iteration.fnr = outcome.fnr;
      iteration.flagged = outcome.flagged_users.size();
    }

    uint64_t kept = 0;
    std::vector<uint64_t> counts(iteration.candidates.size(), 0);
    for (size_t u = 0; u < iteration.reports.size(); ++u) {
      if (!keep[u]) continue;
      ++kept;
      const Report& report = iteration.reports[u];
      for (size_t c = 0; c < iteration.candidates.size(); ++c)
        if (hash_eval(report.seed, iteration.candidates[c] + 1,
                      spec.d_prime) == report.value)
          counts[c] += 1;
    }
    if (kept == 0)
      fail(ErrorCode::DegeneratePartition,
           "pem: a group has no usable reports");

    iteration.candidate_freq.resize(iteration.candidates.size());
    for (size_t c = 0; c < iteration.candidates.size(); ++c)
      iteration.candidate_freq[c] =
          (static_cast<double>(counts[c]) / static_cast<double>(kept) -
           spec.q) /
          (spec.p - spec.q);

    std::vector<uint32_t> order(iteration.candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&iteration](uint32_t a, uint32_t b) {
                       return iteration.candidate_freq[a] >
                              iteration.candidate_freq[b];
                     });
    size_t take = std::min<size_t>(run.config.k, order.size());
    iteration.top.length = iteration.lambda;
    iteration.top.prefixes.clear();
    for (size_t i = 0; i < take; ++i)
      iteration.top.prefixes.push_back(iteration.candidates[order[i]]);

    previous_top = iteration.top;
  }

  run.top_k_items.clear();
  for (uint32_t prefix : run.iterations.back().top.prefixes)
    if (prefix + 1 <= run.dataset_d) run.top_k_items.push_back(prefix + 1);
}

}  // namespace

PemRun run_pem(const PemConfig& config, const Dataset& dataset,
               const AttackConfig* attack, const DetectionConfig* defense,
               RngStream& rng) {
  validate_config(config);
  if (dataset.n() == 0) fail(ErrorCode::EmptyInput, "pem: empty dataset");
  if (dataset.d > (uint32_t{1} << config.gamma))
    fail(ErrorCode::Parameter, "pem: dataset items do not fit in gamma bits");

  PemRun run;
  run.config = config;
  run.dataset_d = dataset.d;
  run.iterations.resize(config.g);
  for (uint32_t j = 1; j <= config.g; ++j)
    run.iterations[j - 1].lambda = lambda_schedule(config, j);

  std::vector<uint32_t> genuine_group(dataset.n());
  for (uint64_t i = 0; i < dataset.n(); ++i)
    genuine_group[i] = 1 + static_cast<uint32_t>(
        rng.substream(rng_role::kGroupAssignment, 0, i).uniform_int(config.g));

  uint64_t m = attack ? attack->m : 0;
  std::vector<uint32_t> fake_group(m);
  for (uint64_t f = 0; f < m; ++f)
    fake_group[f] = 1 + static_cast<uint32_t>(
        rng.substream(rng_role::kGroupAssignment, 1, f).uniform_int(config.g));

  for (uint64_t i = 0; i < dataset.n(); ++i) {
    PemIteration& iteration = run.iterations[genuine_group[i] - 1];
    ProtocolSpec spec = iteration_spec(config, iteration.lambda);
    RngStream user_rng = rng.substream(rng_role::kGenuineReport, i);
    iteration.reports.push_back(perturb(
        spec, prefix_item(dataset.user_items[i], config.gamma, iteration.lambda),
        user_rng));
  }
  for (PemIteration& iteration : run.iterations)
    iteration.fake_start = iteration.reports.size();

  if (attack && m > 0) {
    std::vector<FakeReportBatch> batches =
        attack_pem(config, *attack, fake_group, rng);
    for (uint32_t j = 0; j < config.g; ++j)
      for (Report& report : batches[j].reports)
        run.iterations[j].reports.push_back(std::move(report));
  }

  for (const PemIteration& iteration : run.iterations)
    if (iteration.reports.empty())
      fail(ErrorCode::DegeneratePartition, "pem: a group received no users");

  resolve_cascade(run, defense);
  return run;
}

PemRun defend_pem(const PemRun& run, const DetectionConfig& config) {
  PemRun defended = run;
  resolve_cascade(defended, &config);
  return defended;
}

}  // namespace ldplab
