// Command-line front end for the LDP poisoning laboratory. Uses only the
// public C API from ldp_poison.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldp_poison.h"

namespace {

int fail_with(ldpp_status status) {
  std::fprintf(stderr, "error (%s): %s\n", ldpp_status_name(status),
               ldpp_last_error());
  return 1;
}

std::string default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("LDP_POISON_OUT_DIR");
  if (env && *env) return env;
  return ".";
}

struct CommonFlags {
  std::string protocol = "oue";
  std::string attack = "mga";
  std::string defense = "none";
  std::string dataset = "zipf";
  std::string filter;
  double beta = 0.05;
  uint32_t r = 1;
  double ft = 0.01;
  double epsilon = 1.0;
  uint32_t k = 20;
  uint32_t g = 10;
  uint32_t trials = 20;
  uint64_t seed = 1;
  uint32_t hash_candidates = 1000;
  double eta = 0.01;
  uint32_t d = 1024;
  uint64_t n = 100000;
  double zipf_exponent = 1.5;
  std::string sweep;
  std::string out;
  std::string format = "both";
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags, bool heavy_hitter) {
  cmd->add_option("--protocol", flags->protocol, "Protocol: krr, oue, or olh")
      ->check(CLI::IsMember({"krr", "oue", "olh"}));
  cmd->add_option("--attack", flags->attack, "Attack: rpa, ria, or mga")
      ->check(CLI::IsMember({"rpa", "ria", "mga"}));
  cmd->add_option("--defense", flags->defense,
                  "Defense: none, normalize, detect, or both")
      ->check(CLI::IsMember({"none", "normalize", "detect", "both"}));
  cmd->add_option("--dataset", flags->dataset,
                  "Dataset: zipf, csv:PATH:COLUMN, or file:PATH");
  cmd->add_option("--filter", flags->filter,
                  "CSV row filter COLUMN=VALUE (keeps matching rows)");
  cmd->add_option("--beta", flags->beta, "Fake-user fraction m/(n+m)");
  cmd->add_option("--r", flags->r, "Number of target items");
  cmd->add_option("--ft", flags->ft, "Target frequency mass f_T");
  cmd->add_option("--epsilon", flags->epsilon, "Privacy budget");
  if (heavy_hitter) {
    cmd->add_option("--k", flags->k, "Top-k size");
    cmd->add_option("--g", flags->g, "Group count");
  }
  cmd->add_option("--trials", flags->trials, "Trials per sweep value");
  cmd->add_option("--seed", flags->seed, "Master seed");
  cmd->add_option("--hash-candidates", flags->hash_candidates,
                  "MGA seed-search budget for olh");
  cmd->add_option("--eta", flags->eta, "Detection false-positive budget");
  cmd->add_option("--n", flags->n, "Zipf population size");
  cmd->add_option("--d", flags->d, "Zipf domain size");
  cmd->add_option("--zipf-exponent", flags->zipf_exponent, "Zipf exponent");
  cmd->add_option("--sweep", flags->sweep,
                  "Sweep one parameter: name=v1,v2,... "
                  "(beta, r, ft, epsilon, k, g)");
  cmd->add_option("--out", flags->out,
                  "Output directory (default: $LDP_POISON_OUT_DIR or .)");
  cmd->add_option("--format", flags->format, "Output format: csv, json, both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
}

int split_filter(const std::string& filter, std::string* column,
                 std::string* value) {
  if (filter.empty()) return 0;
  size_t eq = filter.find('=');
  if (eq == std::string::npos || eq == 0) {
    std::fprintf(stderr, "error: --filter expects COLUMN=VALUE\n");
    return 1;
  }
  *column = filter.substr(0, eq);
  *value = filter.substr(eq + 1);
  return 0;
}

int split_sweep(const std::string& sweep, std::string* param,
                std::string* values) {
  if (sweep.empty()) return 0;
  size_t eq = sweep.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == sweep.size()) {
    std::fprintf(stderr, "error: --sweep expects NAME=v1,v2,...\n");
    return 1;
  }
  *param = sweep.substr(0, eq);
  *values = sweep.substr(eq + 1);
  return 0;
}

int run_experiment(const CommonFlags& flags, bool heavy_hitter) {
  std::string filter_column, filter_value, sweep_param, sweep_values;
  if (split_filter(flags.filter, &filter_column, &filter_value)) return 1;
  if (split_sweep(flags.sweep, &sweep_param, &sweep_values)) return 1;

  ldpp_experiment_config config;
  ldpp_experiment_config_init(&config);
  config.protocol = flags.protocol.c_str();
  config.attack = flags.attack.c_str();
  config.defense = flags.defense.c_str();
  config.dataset = flags.dataset.c_str();
  config.filter_column = filter_column.c_str();
  config.filter_value = filter_value.c_str();
  config.beta = flags.beta;
  config.f_t = flags.ft;
  config.epsilon = flags.epsilon;
  config.eta = flags.eta;
  config.zipf_exponent = flags.zipf_exponent;
  config.r = flags.r;
  config.k = flags.k;
  config.g = flags.g;
  config.trials = flags.trials;
  config.hash_candidates = flags.hash_candidates;
  config.d = flags.d;
  config.n = flags.n;
  config.master_seed = flags.seed;
  config.sweep_param = sweep_param.c_str();
  config.sweep_values = sweep_values.c_str();

  ldpp_results* results = nullptr;
  ldpp_status status = heavy_hitter
                           ? ldpp_run_hh_experiment(&config, &results)
                           : ldpp_run_frequency_experiment(&config, &results);
  if (status != LDPP_OK) return fail_with(status);

  size_t count = ldpp_results_count(results);
  for (size_t i = 0; i < count; ++i) {
    ldpp_result_row row;
    if (ldpp_results_row(results, i, &row) != LDPP_OK) continue;
    std::printf("%s/%s/%s", row.protocol, row.attack, row.defense);
    if (row.sweep_param && row.sweep_param[0])
      std::printf(" %s=%g", row.sweep_param, row.sweep_value);
    if (heavy_hitter) {
      std::printf("  success=%.4f", row.success_rate);
    } else {
      std::printf("  gain=%.6f (stderr %.6f, theory %.6f)",
                  row.empirical_gain_mean, row.empirical_gain_stderr,
                  row.theoretical_gain);
    }
    if (row.fpr == row.fpr)
      std::printf("  fpr=%.4f fnr=%.4f", row.fpr, row.fnr);
    std::printf("  [%.2fs]\n", row.wall_clock_seconds);
  }

  std::string out_dir = default_out_dir(flags.out);
  status = ldpp_results_write(results, out_dir.c_str(), flags.format.c_str());
  if (status != LDPP_OK) {
    ldpp_results_free(results);
    return fail_with(status);
  }
  std::printf("results written under %s\n", out_dir.c_str());
  ldpp_results_free(results);
  return 0;
}

int run_theory(const CommonFlags& flags, bool check) {
  if (check) {
    int ok = 0;
    char violation[256];
    ldpp_status status = ldpp_check_theorems(&ok, violation, sizeof(violation));
    if (status != LDPP_OK) return fail_with(status);
    if (ok) {
      std::printf("theorem checks passed\n");
      return 0;
    }
    std::printf("theorem checks FAILED: %s\n", violation);
    return 1;
  }

  std::string sweep_param, sweep_values;
  if (split_sweep(flags.sweep, &sweep_param, &sweep_values)) return 1;

  std::vector<double> values;
  if (!sweep_values.empty()) {
    std::string cell;
    for (char ch : sweep_values + ",") {
      if (ch == ',') {
        if (!cell.empty()) values.push_back(std::atof(cell.c_str()));
        cell.clear();
      } else {
        cell.push_back(ch);
      }
    }
  }

  auto evaluate = [&](double beta, uint32_t r, double ft, double epsilon,
                      uint32_t d, double sweep_value) {
    double gain = 0.0;
    ldpp_status status =
        ldpp_theoretical_gain(flags.protocol.c_str(), flags.attack.c_str(),
                              beta, r, ft, epsilon, d, &gain);
    if (status != LDPP_OK) return fail_with(status);
    if (sweep_param.empty())
      std::printf("%s/%s: gain=%.6f\n", flags.protocol.c_str(),
                  flags.attack.c_str(), gain);
    else
      std::printf("%s/%s %s=%g: gain=%.6f\n", flags.protocol.c_str(),
                  flags.attack.c_str(), sweep_param.c_str(), sweep_value, gain);
    return 0;
  };

  if (sweep_param.empty())
    return evaluate(flags.beta, flags.r, flags.ft, flags.epsilon, flags.d, 0.0);

  for (double value : values) {
    double beta = flags.beta, ft = flags.ft, epsilon = flags.epsilon;
    uint32_t r = flags.r, d = flags.d;
    if (sweep_param == "beta") {
      beta = value;
    } else if (sweep_param == "r") {
      r = static_cast<uint32_t>(value);
    } else if (sweep_param == "ft") {
      ft = value;
    } else if (sweep_param == "epsilon") {
      epsilon = value;
    } else if (sweep_param == "d") {
      d = static_cast<uint32_t>(value);
    } else {
      std::fprintf(stderr,
                   "error: theory sweeps beta, r, ft, epsilon, or d\n");
      return 1;
    }
    if (int rc = evaluate(beta, r, ft, epsilon, d, value)) return rc;
  }
  return 0;
}

int run_ingest(const CommonFlags& flags) {
  std::string filter_column, filter_value;
  if (split_filter(flags.filter, &filter_column, &filter_value)) return 1;

  ldpp_dataset* dataset = nullptr;
  ldpp_status status = LDPP_OK;
  const std::string& source = flags.dataset;
  if (source.rfind("csv:", 0) == 0) {
    std::string rest = source.substr(4);
    size_t colon = rest.rfind(':');
    if (colon == std::string::npos) {
      std::fprintf(stderr, "error: ingest expects --dataset csv:PATH:COLUMN\n");
      return 1;
    }
    status = ldpp_dataset_from_csv(
        rest.substr(0, colon).c_str(), rest.substr(colon + 1).c_str(),
        filter_column.c_str(), filter_value.c_str(), 0, &dataset);
  } else if (source == "zipf") {
    status = ldpp_dataset_zipf(flags.d, flags.n, flags.zipf_exponent,
                               flags.seed, &dataset);
  } else if (source.rfind("file:", 0) == 0) {
    status = ldpp_dataset_load(source.substr(5).c_str(), &dataset);
  } else {
    std::fprintf(stderr,
                 "error: ingest expects --dataset csv:PATH:COLUMN, zipf, "
                 "or file:PATH\n");
    return 1;
  }
  if (status != LDPP_OK) return fail_with(status);

  uint32_t d = 0;
  uint64_t n = 0;
  ldpp_dataset_dims(dataset, &d, &n);
  std::printf("d=%u n=%llu\n", d, static_cast<unsigned long long>(n));

  if (!flags.out.empty()) {
    status = ldpp_dataset_save(dataset, flags.out.c_str());
    if (status != LDPP_OK) {
      ldpp_dataset_free(dataset);
      return fail_with(status);
    }
    std::printf("dataset written to %s\n", flags.out.c_str());
  }
  ldpp_dataset_free(dataset);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation laboratory for data poisoning attacks on LDP frequency "
      "estimation and heavy-hitter identification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file with KEY=VALUE lines");
  app.set_version_flag("--version", ldpp_version());

  CommonFlags freq_flags, hh_flags, theory_flags, ingest_flags;
  bool check_theorems = false;

  CLI::App* freq = app.add_subcommand(
      "freq", "Frequency-estimation attack experiment (paired gain runs)");
  add_common_flags(freq, &freq_flags, false);

  CLI::App* hh = app.add_subcommand(
      "hh", "Heavy-hitter (PEM) attack experiment (success rates)");
  add_common_flags(hh, &hh_flags, true);

  CLI::App* theory = app.add_subcommand(
      "theory", "Closed-form overall gains and theorem checks");
  add_common_flags(theory, &theory_flags, false);
  theory->add_flag("--check-theorems", check_theorems,
                   "Verify gain monotonicity and protocol comparisons");

  CLI::App* ingest = app.add_subcommand(
      "ingest", "Load a dataset, report d and n, optionally export it");
  add_common_flags(ingest, &ingest_flags, false);

  CLI11_PARSE(app, argc, argv);

  if (freq->parsed()) return run_experiment(freq_flags, false);
  if (hh->parsed()) return run_experiment(hh_flags, true);
  if (theory->parsed()) return run_theory(theory_flags, check_theorems);
  if (ingest->parsed()) return run_ingest(ingest_flags);
  return 0;
}
