#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/analysis.hpp"
#include "ldplab/attacks.hpp"
#include "ldplab/data.hpp"
#include "ldplab/defenses.hpp"
#include "ldplab/protocols.hpp"

namespace ldplab {

struct DatasetSource {
  enum class Kind { Zipf, Csv, File };
  Kind kind = Kind::Zipf;
  ZipfConfig zipf;          // Kind::Zipf
  std::string path;         // Kind::Csv and Kind::File
  std::string column;       // Kind::Csv
  std::string filter_column;
  std::string filter_value;
};

struct ExperimentConfig {
  DatasetSource source;
  ProtocolKind protocol = ProtocolKind::OUE;
  AttackKind attack = AttackKind::MGA;
  DefenseMode defense = DefenseMode::None;
  double beta = 0.05;
  uint32_t r = 1;
  double f_T = 0.01;
  double epsilon = 1.0;
  uint32_t k = 20;
  uint32_t g = 10;
  uint32_t trials = 20;
  uint64_t master_seed = 1;
  uint32_t hash_candidates = 1000;
  double eta = 0.01;
  std::string sweep_param;           // empty when nothing is swept
  std::vector<double> sweep_values;
};

struct ResultRecord {
  std::string sweep_param;
  double sweep_value = 0.0;  // NaN when nothing is swept
  std::string protocol;
  std::string attack;
  std::string defense;
  double beta = 0.0;
  uint32_t r = 0;
  double f_T = 0.0;
  double epsilon = 0.0;
  uint32_t k = 0;
  uint32_t g = 0;
  uint64_t n = 0;
  uint32_t d = 0;
  uint64_t m = 0;
  uint32_t trials = 0;
  uint64_t master_seed = 0;
  double theoretical_gain = 0.0;      // NaN for heavy-hitter runs
  double empirical_gain_mean = 0.0;   // NaN for heavy-hitter runs
  double empirical_gain_stderr = 0.0; // NaN for heavy-hitter runs
  double success_rate = 0.0;          // NaN for frequency runs
  double fpr = 0.0;                   // NaN without detection
  double fnr = 0.0;
  double wall_clock_seconds = 0.0;
};

// Greedy target selection honoring the requested target mass: items with
// true frequency at most f_T / r are taken from the most frequent downward
// until r are chosen. Warns to stderr when the realized mass misses f_T by
// more than twenty percent.
std::vector<uint32_t> select_targets(const Dataset& dataset, uint32_t r,
                                     double f_T);

Dataset resolve_dataset(const DatasetSource& source, uint64_t master_seed);

std::vector<ResultRecord> run_frequency_experiment(const ExperimentConfig& config);

std::vector<ResultRecord> run_hh_experiment(const ExperimentConfig& config);

enum class EmitFormat { Csv, Json, Both };

// Writes records under out_dir as results.csv / results.json and returns the
// written paths. The CSV column set is fixed and excludes wall-clock, so
// reruns with one master seed are byte-identical.
std::vector<std::string> emit_results(const std::vector<ResultRecord>& records,
                                      EmitFormat format,
                                      const std::string& out_dir);

std::string results_to_json(const std::vector<ResultRecord>& records);

std::vector<ResultRecord> load_results_csv(const std::string& path);

}  // namespace ldplab
