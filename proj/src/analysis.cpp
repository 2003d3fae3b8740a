#include "ldplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "ldplab/errors.hpp"

namespace ldplab {

double theoretical_gain(ProtocolKind protocol, AttackKind attack, double beta,
                        uint32_t r, double f_T, double epsilon, uint32_t d) {
  if (!(beta >= 0.0) || beta >= 1.0)
    fail(ErrorCode::Parameter, "theoretical_gain: beta must lie in [0, 1)");
  if (r < 1) fail(ErrorCode::Parameter, "theoretical_gain: r must be at least 1");
  if (!(f_T >= 0.0) || f_T > 1.0)
    fail(ErrorCode::Parameter, "theoretical_gain: f_T must lie in [0, 1]");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    fail(ErrorCode::Parameter,
         "theoretical_gain: epsilon must be positive and finite");
  if (d < 2) fail(ErrorCode::Parameter, "theoretical_gain: d must be at least 2");
  if (r > d) fail(ErrorCode::Parameter, "theoretical_gain: r cannot exceed d");

  double rr = static_cast<double>(r);
  double dd = static_cast<double>(d);
  double expm1_eps = std::expm1(epsilon);
  switch (attack) {
    case AttackKind::RPA:
      switch (protocol) {
        case ProtocolKind::KRR: return beta * (rr / dd - f_T);
        case ProtocolKind::OUE: return beta * (rr - f_T);
        case ProtocolKind::OLH: return -beta * f_T;
      }
      break;
    case AttackKind::RIA:
      return beta * (1.0 - f_T);
    case AttackKind::MGA:
      switch (protocol) {
        case ProtocolKind::KRR:
          return beta * (1.0 - f_T) + beta * (dd - rr) / expm1_eps;
        case ProtocolKind::OUE:
        case ProtocolKind::OLH:
          return beta * (2.0 * rr - f_T) + 2.0 * beta * rr / expm1_eps;
      }
      break;
  }
  fail(ErrorCode::Parameter, "theoretical_gain: unknown combination");
}

namespace {

struct SideEstimate {
  FrequencyEstimate estimate;
  double fpr = std::numeric_limits<double>::quiet_NaN();
  double fnr = std::numeric_limits<double>::quiet_NaN();
};

// One side of a paired run: optional detection and removal, aggregation over
// the survivors, optional normalization.
SideEstimate estimate_side(const ProtocolSpec& spec,
                           std::vector<Report>& reports,
                           const DefensePlan* defense,
                           const std::vector<uint8_t>* labels) {
  SideEstimate side;
  bool detect = defense && (defense->mode == DefenseMode::Detect ||
                            defense->mode == DefenseMode::Both);
  bool normalize_active = defense && (defense->mode == DefenseMode::Normalize ||
                                      defense->mode == DefenseMode::Both);
  uint64_t n_total = reports.size();
  std::vector<uint64_t> counts;
  if (detect) {
    DetectionOutcome outcome =
        detect_fake_users(spec, reports, defense->detection, labels);
    side.fpr = outcome.fpr;
    side.fnr = outcome.fnr;
    std::vector<Report> kept;
    kept.reserve(reports.size() - outcome.flagged_users.size());
    size_t cursor = 0;
    for (size_t u = 0; u < reports.size(); ++u) {
      if (cursor < outcome.flagged_users.size() &&
          outcome.flagged_users[cursor] == u) {
        ++cursor;
        continue;
      }
      kept.push_back(std::move(reports[u]));
    }
    if (kept.empty())
      fail(ErrorCode::DegeneratePartition,
           "detection removed every report");
    n_total = kept.size();
    counts = support_counts(spec, kept);
  } else {
    counts = support_counts(spec, reports);
  }
  side.estimate = aggregate_from_counts(spec, counts, n_total);
  if (normalize_active) side.estimate = normalize(side.estimate).estimate;
  return side;
}

}  // namespace

GainReport empirical_gain(const ProtocolSpec& spec, const Dataset& dataset,
                          const AttackConfig& attack,
                          const DefensePlan* defense, uint32_t trials,
                          RngStream& rng) {
  if (trials < 1) fail(ErrorCode::Parameter, "empirical_gain: trials must be >= 1");
  if (dataset.d != spec.d)
    fail(ErrorCode::Parameter,
         "empirical_gain: dataset and protocol domain sizes differ");
  if (attack.targets.empty())
    fail(ErrorCode::Parameter, "empirical_gain: empty target set");
  std::unordered_set<uint32_t> seen;
  for (uint32_t t : attack.targets) {
    if (t < 1 || t > spec.d)
      fail(ErrorCode::Parameter, "empirical_gain: target outside the domain");
    if (!seen.insert(t).second)
      fail(ErrorCode::Parameter, "empirical_gain: targets must be distinct");
  }

  uint64_t n = dataset.n();
  uint64_t m = attack.m;
  GainReport report;
  report.targets = attack.targets;
  report.per_target_gain.assign(attack.targets.size(), 0.0);
  report.n = n;
  report.m = m;
  report.trials = trials;

  std::vector<double> trial_gain(trials, 0.0);
  double fpr_sum = 0.0, fnr_sum = 0.0;
  uint32_t detection_trials = 0;

  for (uint32_t trial = 0; trial < trials; ++trial) {
    RngStream trial_rng = rng.substream(rng_role::kTrial, trial);

    std::vector<Report> genuine;
    genuine.reserve(n);
    for (uint64_t i = 0; i < n; ++i) {
      RngStream user_rng = trial_rng.substream(rng_role::kGenuineReport, i);
      genuine.push_back(perturb(spec, dataset.user_items[i], user_rng));
    }

    std::vector<Report> before = genuine;
    std::vector<uint8_t> before_labels(before.size(), 0);
    SideEstimate before_side =
        estimate_side(spec, before, defense, &before_labels);

    RngStream attack_rng = trial_rng.substream(rng_role::kFakeReport);
    FakeReportBatch fakes = craft_reports(spec, attack, attack_rng);
    std::vector<Report> after = std::move(genuine);
    std::vector<uint8_t> after_labels(after.size(), 0);
    for (Report& fake : fakes.reports) {
      after.push_back(std::move(fake));
      after_labels.push_back(1);
    }
    SideEstimate after_side = estimate_side(spec, after, defense, &after_labels);

    double gain = 0.0;
    for (size_t t = 0; t < attack.targets.size(); ++t) {
      double delta = after_side.estimate.of(attack.targets[t]) -
                     before_side.estimate.of(attack.targets[t]);
      report.per_target_gain[t] += delta;
      gain += delta;
    }
    trial_gain[trial] = gain;

    if (after_side.fpr == after_side.fpr) {
      fpr_sum += after_side.fpr;
      fnr_sum += after_side.fnr;
      ++detection_trials;
    }
  }

  for (double& g : report.per_target_gain) g /= trials;
  report.overall_gain = 0.0;
  for (double g : report.per_target_gain) report.overall_gain += g;

  double mean = 0.0;
  for (double g : trial_gain) mean += g;
  mean /= trials;
  double variance = 0.0;
  for (double g : trial_gain) variance += (g - mean) * (g - mean);
  report.overall_gain_stderr =
      trials > 1 ? std::sqrt(variance / (trials - 1.0) / trials) : 0.0;

  if (detection_trials > 0) {
    report.fpr = fpr_sum / detection_trials;
    report.fnr = fnr_sum / detection_trials;
  } else {
    report.fpr = std::numeric_limits<double>::quiet_NaN();
    report.fnr = std::numeric_limits<double>::quiet_NaN();
  }

  report.f_T = 0.0;
  for (uint32_t t : attack.targets) report.f_T += dataset.true_freq[t - 1];
  report.beta = static_cast<double>(m) / static_cast<double>(n + m);
  report.c = static_cast<double>(m) *
             (report.f_T * (spec.p - spec.q) +
              static_cast<double>(attack.targets.size()) * spec.q) /
             (static_cast<double>(n + m) * (spec.p - spec.q));
  report.theoretical = theoretical_gain(
      spec.kind, attack.kind, report.beta,
      static_cast<uint32_t>(attack.targets.size()), report.f_T, spec.epsilon,
      spec.d);
  return report;
}

double success_rate(const std::vector<uint32_t>& top_k_before,
                    const std::vector<uint32_t>& top_k_after,
                    const std::vector<uint32_t>& targets) {
  (void)top_k_before;
  if (targets.empty())
    fail(ErrorCode::Parameter, "success_rate: empty target set");
  std::unordered_set<uint32_t> after(top_k_after.begin(), top_k_after.end());
  uint64_t hit = 0;
  for (uint32_t t : targets) hit += after.count(t);
  return static_cast<double>(hit) / static_cast<double>(targets.size());
}

namespace {

std::string violation(const char* what, double epsilon, uint32_t d, uint32_t r) {
  std::ostringstream out;
  out << what << " at epsilon=" << epsilon << " d=" << d << " r=" << r;
  return out.str();
}

}  // namespace

TheoremReport check_theorems(const TheoremGrid& grid) {
  TheoremReport report;
  std::vector<double> epsilons = grid.epsilons;
  std::sort(epsilons.begin(), epsilons.end());

  constexpr ProtocolKind kProtocols[] = {ProtocolKind::KRR, ProtocolKind::OUE,
                                         ProtocolKind::OLH};
  for (uint32_t d : grid.ds) {
    for (uint32_t r : grid.rs) {
      if (r >= d) continue;
      for (ProtocolKind protocol : kProtocols) {
        double previous = std::numeric_limits<double>::infinity();
        for (double epsilon : epsilons) {
          double gain =
              theoretical_gain(protocol, AttackKind::MGA, 0.05, r, 0.01,
                               epsilon, d);
          ++report.points_checked;
          if (!(gain < previous)) {
            report.monotone_ok = false;
            if (report.first_violation.empty())
              report.first_violation =
                  violation("gain not decreasing in epsilon", epsilon, d, r);
          }
          previous = gain;
        }
      }
      for (double epsilon : epsilons) {
        double gain_krr = theoretical_gain(ProtocolKind::KRR, AttackKind::MGA,
                                           0.05, r, 0.01, epsilon, d);
        double gain_oue = theoretical_gain(ProtocolKind::OUE, AttackKind::MGA,
                                           0.05, r, 0.01, epsilon, d);
        double gain_olh = theoretical_gain(ProtocolKind::OLH, AttackKind::MGA,
                                           0.05, r, 0.01, epsilon, d);
        ++report.points_checked;
        if (std::abs(gain_oue - gain_olh) >
            1e-12 * std::max(1.0, std::abs(gain_oue))) {
          report.oue_olh_equal_ok = false;
          if (report.first_violation.empty())
            report.first_violation =
                violation("oue and olh gains differ", epsilon, d, r);
        }
        double crossover = (2.0 * r - 1.0) * std::expm1(epsilon) + 3.0 * r;
        if (std::abs(static_cast<double>(d) - crossover) < 1e-9) continue;
        bool predicted = static_cast<double>(d) > crossover;
        bool observed = gain_krr > gain_oue;
        if (predicted != observed) {
          report.crossover_ok = false;
          if (report.first_violation.empty())
            report.first_violation =
                violation("crossover prediction failed", epsilon, d, r);
        }
      }
    }
  }
  return report;
}

TheoremGrid default_theorem_grid() {
  TheoremGrid grid;
  grid.epsilons = {0.25, 0.5, 1.0, 2.0, 4.0, 6.0};
  grid.ds = {2, 4, 5, 8, 16, 32, 64, 102, 128, 244, 512, 1024};
  grid.rs = {1, 2, 5, 10, 20};
  return grid;
}

}  // namespace ldplab
