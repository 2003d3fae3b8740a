#include "ldplab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ldplab/errors.hpp"
#include "ldplab/heavy_hitter.hpp"

namespace ldplab {

namespace {

constexpr uint64_t kExperimentRole = 100;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void validate_common(const ExperimentConfig& config) {
  if (!(config.beta >= 0.0) || config.beta >= 1.0)
    fail(ErrorCode::Parameter, "beta must lie in [0, 1)");
  if (config.r < 1) fail(ErrorCode::Parameter, "r must be at least 1");
  if (!(config.f_T > 0.0) || config.f_T > 1.0)
    fail(ErrorCode::Parameter, "f_T must lie in (0, 1]");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    fail(ErrorCode::Parameter, "epsilon must be positive and finite");
  if (config.trials < 1) fail(ErrorCode::Parameter, "trials must be at least 1");
  if (!(config.eta > 0.0) || config.eta >= 1.0)
    fail(ErrorCode::Parameter, "eta must lie in (0, 1)");
  if (config.hash_candidates < 1)
    fail(ErrorCode::Parameter, "hash_candidates must be at least 1");
  if (!config.sweep_param.empty() && config.sweep_values.empty())
    fail(ErrorCode::Parameter,
         "sweep requested without values; pass --sweep name=v1,v2,...");
}

void refuse_undetectable(const ExperimentConfig& config) {
  bool detecting = config.defense == DefenseMode::Detect ||
                   config.defense == DefenseMode::Both;
  if (!detecting) return;
  if (config.protocol == ProtocolKind::KRR)
    fail(ErrorCode::NotApplicable,
         "defense 'detect' is not available for protocol 'krr'; "
         "krr reports carry a single item and expose no multi-item pattern");
  if (config.attack == AttackKind::RIA)
    fail(ErrorCode::NotApplicable,
         "defense 'detect' is not applied to attack 'ria'; "
         "ria reports are protocol-conformant and indistinguishable");
}

uint32_t checked_integer(double value, const char* what) {
  double rounded = std::round(value);
  if (!(value > 0.0) || std::abs(value - rounded) > 1e-9 || rounded > 4e9)
    fail(ErrorCode::Parameter,
         std::string(what) + " must be a positive integer");
  return static_cast<uint32_t>(rounded);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, double value,
                                   bool heavy_hitter) {
  ExperimentConfig config = base;
  const std::string& param = base.sweep_param;
  if (param == "beta") {
    config.beta = value;
  } else if (param == "r") {
    config.r = checked_integer(value, "swept r");
  } else if (param == "ft") {
    config.f_T = value;
  } else if (param == "epsilon") {
    config.epsilon = value;
  } else if (param == "k" && heavy_hitter) {
    config.k = checked_integer(value, "swept k");
  } else if (param == "g" && heavy_hitter) {
    config.g = checked_integer(value, "swept g");
  } else {
    fail(ErrorCode::Parameter,
         "unknown sweep parameter '" + param + "' for this experiment; " +
             (heavy_hitter ? "hh sweeps beta, r, ft, epsilon, k, or g"
                           : "freq sweeps beta, r, ft, or epsilon"));
  }
  return config;
}

ResultRecord base_record(const ExperimentConfig& config, const Dataset& dataset,
                         const std::string& sweep_param, double sweep_value) {
  ResultRecord record;
  record.sweep_param = sweep_param;
  record.sweep_value = sweep_value;
  record.protocol = protocol_name(config.protocol);
  record.attack = attack_name(config.attack);
  record.defense = defense_name(config.defense);
  record.beta = config.beta;
  record.r = config.r;
  record.f_T = config.f_T;
  record.epsilon = config.epsilon;
  record.k = config.k;
  record.g = config.g;
  record.n = dataset.n();
  record.d = dataset.d;
  record.m = beta_to_m(config.beta, dataset.n());
  record.trials = config.trials;
  record.master_seed = config.master_seed;
  record.theoretical_gain = kNaN;
  record.empirical_gain_mean = kNaN;
  record.empirical_gain_stderr = kNaN;
  record.success_rate = kNaN;
  record.fpr = kNaN;
  record.fnr = kNaN;
  return record;
}

}  // namespace

std::vector<uint32_t> select_targets(const Dataset& dataset, uint32_t r,
                                     double f_T) {
  if (r < 1 || r > dataset.d)
    fail(ErrorCode::Parameter, "target count must lie in [1, d]");
  if (!(f_T > 0.0) || f_T > 1.0)
    fail(ErrorCode::Parameter, "f_T must lie in (0, 1]");

  double ceiling = f_T / static_cast<double>(r);
  std::vector<uint32_t> order(dataset.d);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&dataset](uint32_t a, uint32_t b) {
    return dataset.true_freq[a - 1] > dataset.true_freq[b - 1];
  });

  std::vector<uint32_t> targets;
  double mass = 0.0;
  for (uint32_t item : order) {
    if (dataset.true_freq[item - 1] > ceiling) continue;
    targets.push_back(item);
    mass += dataset.true_freq[item - 1];
    if (targets.size() == r) break;
  }
  if (targets.size() < r)
    fail(ErrorCode::Parameter,
         "dataset has too few items rare enough for the requested f_T");
  if (mass < 0.8 * f_T || mass > 1.2 * f_T)
    std::cerr << "warning: selected target mass " << mass
              << " misses the requested f_T " << f_T << " by more than 20%\n";
  std::sort(targets.begin(), targets.end());
  return targets;
}

Dataset resolve_dataset(const DatasetSource& source, uint64_t master_seed) {
  switch (source.kind) {
    case DatasetSource::Kind::Zipf: {
      RngStream master(master_seed);
      RngStream synth = master.substream(rng_role::kSynthesis);
      return synth_zipf(source.zipf, synth);
    }
    case DatasetSource::Kind::Csv: {
      CsvIngestOptions options;
      options.filter_column = source.filter_column;
      options.filter_value = source.filter_value;
      return ingest_csv(source.path, source.column, options);
    }
    case DatasetSource::Kind::File:
      return import_dataset(source.path);
  }
  fail(ErrorCode::Parameter, "unknown dataset source");
}

std::vector<ResultRecord> run_frequency_experiment(
    const ExperimentConfig& config) {
  validate_common(config);
  refuse_undetectable(config);
  if (!config.sweep_param.empty() &&
      (config.sweep_param == "k" || config.sweep_param == "g"))
    fail(ErrorCode::Parameter,
         "freq experiments sweep beta, r, ft, or epsilon");

  Dataset dataset = resolve_dataset(config.source, config.master_seed);
  RngStream master(config.master_seed);

  std::vector<double> values = config.sweep_values;
  bool swept = !config.sweep_param.empty();
  if (!swept) values = {kNaN};

  std::vector<ResultRecord> records;
  for (size_t index = 0; index < values.size(); ++index) {
    ExperimentConfig point =
        swept ? apply_sweep_value(config, values[index], false) : config;
    auto start = std::chrono::steady_clock::now();

    ProtocolSpec spec = derive_params(point.protocol, point.epsilon, dataset.d);
    AttackConfig attack;
    attack.kind = point.attack;
    attack.targets = select_targets(dataset, point.r, point.f_T);
    attack.m = beta_to_m(point.beta, dataset.n());
    attack.hash_candidates = point.hash_candidates;

    DefensePlan plan;
    plan.mode = point.defense;
    plan.detection.eta = point.eta;

    RngStream point_rng = master.substream(kExperimentRole, index);
    GainReport gain = empirical_gain(spec, dataset, attack,
                                     point.defense == DefenseMode::None
                                         ? nullptr
                                         : &plan,
                                     point.trials, point_rng);

    ResultRecord record =
        base_record(point, dataset, config.sweep_param, values[index]);
    record.m = attack.m;
    record.theoretical_gain = gain.theoretical;
    record.empirical_gain_mean = gain.overall_gain;
    record.empirical_gain_stderr = gain.overall_gain_stderr;
    record.fpr = gain.fpr;
    record.fnr = gain.fnr;
    record.wall_clock_seconds = elapsed_seconds(start);
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ResultRecord> run_hh_experiment(const ExperimentConfig& config) {
  validate_common(config);
  ExperimentConfig olh_view = config;
  olh_view.protocol = ProtocolKind::OLH;  // PEM runs OLH iterations
  refuse_undetectable(olh_view);
  if (config.k < 1) fail(ErrorCode::Parameter, "k must be at least 1");
  if (config.g < 1) fail(ErrorCode::Parameter, "g must be at least 1");

  Dataset dataset = resolve_dataset(config.source, config.master_seed);
  RngStream master(config.master_seed);

  std::vector<double> values = config.sweep_values;
  bool swept = !config.sweep_param.empty();
  if (!swept) values = {kNaN};

  std::vector<ResultRecord> records;
  for (size_t index = 0; index < values.size(); ++index) {
    ExperimentConfig point =
        swept ? apply_sweep_value(config, values[index], true) : config;
    auto start = std::chrono::steady_clock::now();

    if (point.r >= point.k)
      std::cerr << "warning: r=" << point.r << " targets cannot all enter a"
                << " top-" << point.k << " list; success is capped below 1\n";
    uint32_t gamma = 1;
    while ((uint32_t{1} << gamma) < dataset.d) ++gamma;

    PemConfig pem;
    pem.k = point.k;
    pem.g = point.g;
    pem.gamma = gamma;
    pem.epsilon = point.epsilon;

    bool detecting = point.defense == DefenseMode::Detect ||
                     point.defense == DefenseMode::Both;
    DetectionConfig detection;
    detection.eta = point.eta;

    uint64_t m = beta_to_m(point.beta, dataset.n());
    double success_sum = 0.0;
    double fpr_sum = 0.0, fnr_sum = 0.0;
    uint64_t defended_iterations = 0;

    for (uint32_t trial = 0; trial < point.trials; ++trial) {
      RngStream trial_rng =
          master.substream(kExperimentRole, index, trial);

      PemRun before = run_pem(pem, dataset, nullptr, nullptr, trial_rng);

      RngStream target_rng = trial_rng.substream(rng_role::kTargetSelection);
      std::unordered_set<uint32_t> excluded(before.top_k_items.begin(),
                                            before.top_k_items.end());
      if (static_cast<uint64_t>(point.r) + excluded.size() > dataset.d)
        fail(ErrorCode::Parameter,
             "not enough items outside the current top-k to pick targets");
      std::unordered_set<uint32_t> picked;
      std::vector<uint32_t> targets;
      while (targets.size() < point.r) {
        uint32_t item =
            static_cast<uint32_t>(target_rng.uniform_int(dataset.d)) + 1;
        if (excluded.count(item) || !picked.insert(item).second) continue;
        targets.push_back(item);
      }
      std::sort(targets.begin(), targets.end());

      AttackConfig attack;
      attack.kind = point.attack;
      attack.targets = targets;
      attack.m = m;
      attack.hash_candidates = point.hash_candidates;

      PemRun after = run_pem(pem, dataset, &attack,
                             detecting ? &detection : nullptr, trial_rng);
      success_sum +=
          success_rate(before.top_k_items, after.top_k_items, targets);
      if (detecting) {
        for (const PemIteration& iteration : after.iterations) {
          fpr_sum += iteration.fpr;
          fnr_sum += iteration.fnr;
          ++defended_iterations;
        }
      }
    }

    ResultRecord record =
        base_record(point, dataset, config.sweep_param, values[index]);
    record.protocol = protocol_name(ProtocolKind::OLH);
    record.m = m;
    record.success_rate = success_sum / point.trials;
    if (defended_iterations > 0) {
      record.fpr = fpr_sum / static_cast<double>(defended_iterations);
      record.fnr = fnr_sum / static_cast<double>(defended_iterations);
    }
    record.wall_clock_seconds = elapsed_seconds(start);
    records.push_back(std::move(record));
  }
  return records;
}

namespace {

const char* const kCsvColumns[] = {
    "sweep_param", "sweep_value", "protocol", "attack", "defense",
    "beta", "r", "f_t", "epsilon", "k", "g", "n", "d", "m", "trials",
    "master_seed", "theoretical_gain", "empirical_gain_mean",
    "empirical_gain_stderr", "success_rate", "fpr", "fnr"};

std::string format_double(double value) {
  if (value != value) return "";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string csv_line(const ResultRecord& r) {
  std::ostringstream out;
  out << r.sweep_param << ',' << format_double(r.sweep_value) << ','
      << r.protocol << ',' << r.attack << ',' << r.defense << ','
      << format_double(r.beta) << ',' << r.r << ',' << format_double(r.f_T)
      << ',' << format_double(r.epsilon) << ',' << r.k << ',' << r.g << ','
      << r.n << ',' << r.d << ',' << r.m << ',' << r.trials << ','
      << r.master_seed << ',' << format_double(r.theoretical_gain) << ','
      << format_double(r.empirical_gain_mean) << ','
      << format_double(r.empirical_gain_stderr) << ','
      << format_double(r.success_rate) << ',' << format_double(r.fpr) << ','
      << format_double(r.fnr);
  return out.str();
}

nlohmann::json record_json(const ResultRecord& r) {
  auto number = [](double value) {
    return value != value ? nlohmann::json(nullptr) : nlohmann::json(value);
  };
  return nlohmann::json{{"sweep_param", r.sweep_param},
                        {"sweep_value", number(r.sweep_value)},
                        {"protocol", r.protocol},
                        {"attack", r.attack},
                        {"defense", r.defense},
                        {"beta", r.beta},
                        {"r", r.r},
                        {"f_t", r.f_T},
                        {"epsilon", r.epsilon},
                        {"k", r.k},
                        {"g", r.g},
                        {"n", r.n},
                        {"d", r.d},
                        {"m", r.m},
                        {"trials", r.trials},
                        {"master_seed", r.master_seed},
                        {"theoretical_gain", number(r.theoretical_gain)},
                        {"empirical_gain_mean", number(r.empirical_gain_mean)},
                        {"empirical_gain_stderr",
                         number(r.empirical_gain_stderr)},
                        {"success_rate", number(r.success_rate)},
                        {"fpr", number(r.fpr)},
                        {"fnr", number(r.fnr)},
                        {"wall_clock_seconds", r.wall_clock_seconds}};
}

}  // namespace

std::string results_to_json(const std::vector<ResultRecord>& records) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["records"] = nlohmann::json::array();
  for (const ResultRecord& record : records)
    doc["records"].push_back(record_json(record));
  return doc.dump(2) + "\n";
}

std::vector<std::string> emit_results(const std::vector<ResultRecord>& records,
                                      EmitFormat format,
                                      const std::string& out_dir) {
  if (records.empty())
    fail(ErrorCode::EmptyInput,
         "no results to emit; run an experiment with at least one sweep value");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + out_dir);

  std::vector<std::string> written;
  if (format == EmitFormat::Csv || format == EmitFormat::Both) {
    std::string path = (std::filesystem::path(out_dir) / "results.csv").string();
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    for (size_t i = 0; i < std::size(kCsvColumns); ++i)
      out << (i ? "," : "") << kCsvColumns[i];
    out << "\n";
    for (const ResultRecord& record : records) out << csv_line(record) << "\n";
    if (!out) fail(ErrorCode::Io, "failed while writing " + path);
    written.push_back(path);
  }
  if (format == EmitFormat::Json || format == EmitFormat::Both) {
    std::string path =
        (std::filesystem::path(out_dir) / "results.json").string();
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << results_to_json(records);
    if (!out) fail(ErrorCode::Io, "failed while writing " + path);
    written.push_back(path);
  }
  return written;
}

std::vector<ResultRecord> load_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Ingestion, "empty file: " + path);

  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : text) {
      if (ch == ',') {
        cells.push_back(cell);
        cell.clear();
      } else if (ch != '\r') {
        cell.push_back(ch);
      }
    }
    cells.push_back(cell);
    return cells;
  };
  auto to_double = [](const std::string& cell) {
    return cell.empty() ? kNaN : std::stod(cell);
  };

  std::vector<ResultRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != std::size(kCsvColumns))
      fail(ErrorCode::Ingestion, "malformed results row in " + path);
    ResultRecord r;
    r.sweep_param = cells[0];
    r.sweep_value = to_double(cells[1]);
    r.protocol = cells[2];
    r.attack = cells[3];
    r.defense = cells[4];
    r.beta = to_double(cells[5]);
    r.r = static_cast<uint32_t>(std::stoul(cells[6]));
    r.f_T = to_double(cells[7]);
    r.epsilon = to_double(cells[8]);
    r.k = static_cast<uint32_t>(std::stoul(cells[9]));
    r.g = static_cast<uint32_t>(std::stoul(cells[10]));
    r.n = std::stoull(cells[11]);
    r.d = static_cast<uint32_t>(std::stoul(cells[12]));
    r.m = std::stoull(cells[13]);
    r.trials = static_cast<uint32_t>(std::stoul(cells[14]));
    r.master_seed = std::stoull(cells[15]);
    r.theoretical_gain = to_double(cells[16]);
    r.empirical_gain_mean = to_double(cells[17]);
    r.empirical_gain_stderr = to_double(cells[18]);
    r.success_rate = to_double(cells[19]);
    r.fpr = to_double(cells[20]);
    r.fnr = to_double(cells[21]);
    r.wall_clock_seconds = kNaN;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace ldplab
