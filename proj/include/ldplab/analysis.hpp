#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/attacks.hpp"
#include "ldplab/data.hpp"
#include "ldplab/defenses.hpp"
#include "ldplab/protocols.hpp"
#include "ldplab/rng.hpp"

namespace ldplab {

// Closed-form expected overall gain of an attack against a protocol.
double theoretical_gain(ProtocolKind protocol, AttackKind attack, double beta,
                        uint32_t r, double f_T, double epsilon, uint32_t d);

struct DefensePlan {
  DefenseMode mode = DefenseMode::None;
  DetectionConfig detection;
};

struct GainReport {
  std::vector<uint32_t> targets;
  std::vector<double> per_target_gain;  // mean gain per target, same order
  double overall_gain = 0.0;            // sum of the per-target means
  double overall_gain_stderr = 0.0;     // standard error over trials
  double theoretical = 0.0;  // matching closed form at the realized beta, f_T
  double f_T = 0.0;          // true frequency mass of the targets
  double beta = 0.0;         // realized m / (n + m)
  double c = 0.0;            // attack-independent shift constant
  uint64_t n = 0;
  uint64_t m = 0;
  uint32_t trials = 0;
  double fpr = 0.0;  // detection means over trials, NaN without detection
  double fnr = 0.0;
};

// Measures the attack's frequency gain with paired runs: each trial draws the
// genuine reports once (per-user substreams) and aggregates with and without
// the fake reports, so the difference isolates the attack. Defenses apply to
// both sides of the pair.
GainReport empirical_gain(const ProtocolSpec& spec, const Dataset& dataset,
                          const AttackConfig& attack,
                          const DefensePlan* defense, uint32_t trials,
                          RngStream& rng);

// Fraction of targets present in the post-attack top-k.
double success_rate(const std::vector<uint32_t>& top_k_before,
                    const std::vector<uint32_t>& top_k_after,
                    const std::vector<uint32_t>& targets);

struct TheoremGrid {
  std::vector<double> epsilons;
  std::vector<uint32_t> ds;
  std::vector<uint32_t> rs;
};

struct TheoremReport {
  bool monotone_ok = true;   // MGA gain strictly decreasing in epsilon
  bool crossover_ok = true;  // kRR beats OUE exactly on the predicted side
  bool oue_olh_equal_ok = true;
  uint64_t points_checked = 0;
  std::string first_violation;

  bool ok() const { return monotone_ok && crossover_ok && oue_olh_equal_ok; }
};

TheoremReport check_theorems(const TheoremGrid& grid);

TheoremGrid default_theorem_grid();

}  // namespace ldplab
