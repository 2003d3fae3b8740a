#include "ldp_poison.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "ldplab/analysis.hpp"
#include "ldplab/data.hpp"
#include "ldplab/errors.hpp"
#include "ldplab/harness.hpp"

namespace {

thread_local std::string g_last_error;

ldpp_status status_of(ldplab::ErrorCode code) {
  using ldplab::ErrorCode;
  switch (code) {
    case ErrorCode::Parameter: return LDPP_ERR_PARAMETER;
    case ErrorCode::Domain: return LDPP_ERR_DOMAIN;
    case ErrorCode::Protocol: return LDPP_ERR_PROTOCOL;
    case ErrorCode::NotApplicable: return LDPP_ERR_NOT_APPLICABLE;
    case ErrorCode::Ingestion: return LDPP_ERR_INGESTION;
    case ErrorCode::Io: return LDPP_ERR_IO;
    case ErrorCode::EmptyInput: return LDPP_ERR_EMPTY_INPUT;
    case ErrorCode::DegeneratePartition: return LDPP_ERR_DEGENERATE_PARTITION;
  }
  return LDPP_ERR_UNKNOWN;
}

template <typename Fn>
ldpp_status guarded(Fn&& fn) {
  try {
    fn();
    return LDPP_OK;
  } catch (const ldplab::Error& error) {
    g_last_error = error.what();
    return status_of(error.code());
  } catch (const std::exception& error) {
    g_last_error = error.what();
    return LDPP_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return LDPP_ERR_UNKNOWN;
  }
}

ldpp_status invalid(const char* message) {
  g_last_error = message;
  return LDPP_ERR_PARAMETER;
}

std::string text_or_empty(const char* text) { return text ? text : ""; }

ldplab::ProtocolKind parse_protocol(const std::string& name) {
  if (name == "krr") return ldplab::ProtocolKind::KRR;
  if (name == "oue") return ldplab::ProtocolKind::OUE;
  if (name == "olh") return ldplab::ProtocolKind::OLH;
  ldplab::fail(ldplab::ErrorCode::Parameter,
               "unknown protocol '" + name + "'; expected krr, oue, or olh");
}

ldplab::AttackKind parse_attack(const std::string& name) {
  if (name == "rpa") return ldplab::AttackKind::RPA;
  if (name == "ria") return ldplab::AttackKind::RIA;
  if (name == "mga") return ldplab::AttackKind::MGA;
  ldplab::fail(ldplab::ErrorCode::Parameter,
               "unknown attack '" + name + "'; expected rpa, ria, or mga");
}

ldplab::DefenseMode parse_defense(const std::string& name) {
  if (name == "none" || name.empty()) return ldplab::DefenseMode::None;
  if (name == "normalize") return ldplab::DefenseMode::Normalize;
  if (name == "detect") return ldplab::DefenseMode::Detect;
  if (name == "both") return ldplab::DefenseMode::Both;
  ldplab::fail(ldplab::ErrorCode::Parameter,
               "unknown defense '" + name +
                   "'; expected none, normalize, detect, or both");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    std::string cell = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!cell.empty()) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        ldplab::fail(ldplab::ErrorCode::Parameter,
                     "malformed sweep value '" + cell + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

ldplab::DatasetSource parse_source(const ldpp_experiment_config& config) {
  ldplab::DatasetSource source;
  std::string text = text_or_empty(config.dataset);
  if (text.empty() || text == "zipf") {
    source.kind = ldplab::DatasetSource::Kind::Zipf;
    source.zipf.d = config.d;
    source.zipf.n = config.n;
    source.zipf.exponent = config.zipf_exponent;
  } else if (text.rfind("csv:", 0) == 0) {
    std::string rest = text.substr(4);
    size_t colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size())
      ldplab::fail(ldplab::ErrorCode::Parameter,
                   "csv dataset must look like csv:PATH:COLUMN");
    source.kind = ldplab::DatasetSource::Kind::Csv;
    source.path = rest.substr(0, colon);
    source.column = rest.substr(colon + 1);
    source.filter_column = text_or_empty(config.filter_column);
    source.filter_value = text_or_empty(config.filter_value);
  } else if (text.rfind("file:", 0) == 0) {
    source.kind = ldplab::DatasetSource::Kind::File;
    source.path = text.substr(5);
  } else {
    ldplab::fail(ldplab::ErrorCode::Parameter,
                 "unknown dataset '" + text +
                     "'; expected zipf, csv:PATH:COLUMN, or file:PATH");
  }
  return source;
}

ldplab::ExperimentConfig parse_config(const ldpp_experiment_config& config) {
  ldplab::ExperimentConfig parsed;
  parsed.source = parse_source(config);
  parsed.protocol = parse_protocol(text_or_empty(config.protocol));
  parsed.attack = parse_attack(text_or_empty(config.attack));
  parsed.defense = parse_defense(text_or_empty(config.defense));
  parsed.beta = config.beta;
  parsed.r = config.r;
  parsed.f_T = config.f_t;
  parsed.epsilon = config.epsilon;
  parsed.k = config.k;
  parsed.g = config.g;
  parsed.trials = config.trials;
  parsed.master_seed = config.master_seed;
  parsed.hash_candidates = config.hash_candidates;
  parsed.eta = config.eta;
  parsed.sweep_param = text_or_empty(config.sweep_param);
  parsed.sweep_values = parse_values(text_or_empty(config.sweep_values));
  return parsed;
}

}  // namespace

struct ldpp_dataset {
  ldplab::Dataset data;
};

struct ldpp_results {
  std::vector<ldplab::ResultRecord> records;
};

extern "C" {

const char* ldpp_version(void) { return "1.0.0"; }

const char* ldpp_last_error(void) { return g_last_error.c_str(); }

const char* ldpp_status_name(ldpp_status status) {
  switch (status) {
    case LDPP_OK: return "ok";
    case LDPP_ERR_PARAMETER: return "parameter";
    case LDPP_ERR_DOMAIN: return "domain";
    case LDPP_ERR_PROTOCOL: return "protocol";
    case LDPP_ERR_NOT_APPLICABLE: return "not_applicable";
    case LDPP_ERR_INGESTION: return "ingestion";
    case LDPP_ERR_IO: return "io";
    case LDPP_ERR_EMPTY_INPUT: return "empty_input";
    case LDPP_ERR_DEGENERATE_PARTITION: return "degenerate_partition";
    case LDPP_ERR_UNKNOWN: break;
  }
  return "unknown";
}

ldpp_status ldpp_dataset_zipf(uint32_t d, uint64_t n, double exponent,
                              uint64_t seed, ldpp_dataset** out) {
  if (!out) return invalid("out must not be null");
  return guarded([&] {
    ldplab::ZipfConfig config{d, n, exponent};
    ldplab::RngStream master(seed);
    ldplab::RngStream synth = master.substream(ldplab::rng_role::kSynthesis);
    *out = new ldpp_dataset{ldplab::synth_zipf(config, synth)};
  });
}

ldpp_status ldpp_dataset_from_csv(const char* path, const char* column,
                                  const char* filter_column,
                                  const char* filter_value, uint64_t max_rows,
                                  ldpp_dataset** out) {
  if (!out || !path || !column) return invalid("path, column, out required");
  return guarded([&] {
    ldplab::CsvIngestOptions options;
    options.filter_column = text_or_empty(filter_column);
    options.filter_value = text_or_empty(filter_value);
    options.max_rows = max_rows;
    *out = new ldpp_dataset{ldplab::ingest_csv(path, column, options)};
  });
}

ldpp_status ldpp_dataset_load(const char* path, ldpp_dataset** out) {
  if (!out || !path) return invalid("path and out required");
  return guarded([&] { *out = new ldpp_dataset{ldplab::import_dataset(path)}; });
}

ldpp_status ldpp_dataset_save(const ldpp_dataset* dataset, const char* path) {
  if (!dataset || !path) return invalid("dataset and path required");
  return guarded([&] { ldplab::export_dataset(dataset->data, path); });
}

ldpp_status ldpp_dataset_dims(const ldpp_dataset* dataset, uint32_t* d,
                              uint64_t* n) {
  if (!dataset) return invalid("dataset required");
  if (d) *d = dataset->data.d;
  if (n) *n = dataset->data.n();
  return LDPP_OK;
}

void ldpp_dataset_free(ldpp_dataset* dataset) { delete dataset; }

ldpp_status ldpp_theoretical_gain(const char* protocol, const char* attack,
                                  double beta, uint32_t r, double f_t,
                                  double epsilon, uint32_t d, double* out) {
  if (!out) return invalid("out must not be null");
  return guarded([&] {
    *out = ldplab::theoretical_gain(parse_protocol(text_or_empty(protocol)),
                                    parse_attack(text_or_empty(attack)), beta,
                                    r, f_t, epsilon, d);
  });
}

ldpp_status ldpp_check_theorems(int* ok, char* violation,
                                size_t violation_len) {
  if (!ok) return invalid("ok must not be null");
  return guarded([&] {
    ldplab::TheoremReport report =
        ldplab::check_theorems(ldplab::default_theorem_grid());
    *ok = report.ok() ? 1 : 0;
    if (violation && violation_len > 0) {
      std::snprintf(violation, violation_len, "%s",
                    report.first_violation.c_str());
    }
  });
}

void ldpp_experiment_config_init(ldpp_experiment_config* config) {
  if (!config) return;
  std::memset(config, 0, sizeof(*config));
  config->protocol = "oue";
  config->attack = "mga";
  config->defense = "none";
  config->dataset = "zipf";
  config->beta = 0.05;
  config->f_t = 0.01;
  config->epsilon = 1.0;
  config->eta = 0.01;
  config->zipf_exponent = 1.5;
  config->r = 1;
  config->k = 20;
  config->g = 10;
  config->trials = 20;
  config->hash_candidates = 1000;
  config->d = 1024;
  config->n = 100000;
  config->master_seed = 1;
}

ldpp_status ldpp_run_frequency_experiment(const ldpp_experiment_config* config,
                                          ldpp_results** out) {
  if (!config || !out) return invalid("config and out required");
  return guarded([&] {
    *out = new ldpp_results{
        ldplab::run_frequency_experiment(parse_config(*config))};
  });
}

ldpp_status ldpp_run_hh_experiment(const ldpp_experiment_config* config,
                                   ldpp_results** out) {
  if (!config || !out) return invalid("config and out required");
  return guarded(
      [&] { *out = new ldpp_results{ldplab::run_hh_experiment(parse_config(*config))}; });
}

size_t ldpp_results_count(const ldpp_results* results) {
  return results ? results->records.size() : 0;
}

ldpp_status ldpp_results_row(const ldpp_results* results, size_t index,
                             ldpp_result_row* out) {
  if (!results || !out) return invalid("results and out required");
  if (index >= results->records.size()) return invalid("row index out of range");
  const ldplab::ResultRecord& r = results->records[index];
  out->sweep_param = r.sweep_param.c_str();
  out->sweep_value = r.sweep_value;
  out->protocol = r.protocol.c_str();
  out->attack = r.attack.c_str();
  out->defense = r.defense.c_str();
  out->beta = r.beta;
  out->r = r.r;
  out->f_t = r.f_T;
  out->epsilon = r.epsilon;
  out->k = r.k;
  out->g = r.g;
  out->n = r.n;
  out->d = r.d;
  out->m = r.m;
  out->trials = r.trials;
  out->master_seed = r.master_seed;
  out->theoretical_gain = r.theoretical_gain;
  out->empirical_gain_mean = r.empirical_gain_mean;
  out->empirical_gain_stderr = r.empirical_gain_stderr;
  out->success_rate = r.success_rate;
  out->fpr = r.fpr;
  out->fnr = r.fnr;
  out->wall_clock_seconds = r.wall_clock_seconds;
  return LDPP_OK;
}

ldpp_status ldpp_results_write(const ldpp_results* results, const char* out_dir,
                               const char* format) {
  if (!results || !out_dir) return invalid("results and out_dir required");
  return guarded([&] {
    std::string name = text_or_empty(format);
    ldplab::EmitFormat emit_format;
    if (name == "csv") {
      emit_format = ldplab::EmitFormat::Csv;
    } else if (name == "json") {
      emit_format = ldplab::EmitFormat::Json;
    } else if (name == "both" || name.empty()) {
      emit_format = ldplab::EmitFormat::Both;
    } else {
      ldplab::fail(ldplab::ErrorCode::Parameter,
                   "unknown format '" + name + "'; expected csv, json, or both");
    }
    ldplab::emit_results(results->records, emit_format, out_dir);
  });
}

ldpp_status ldpp_results_to_json(const ldpp_results* results, char** out) {
  if (!results || !out) return invalid("results and out required");
  return guarded([&] {
    std::string text = ldplab::results_to_json(results->records);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out = buffer;
  });
}

void ldpp_results_free(ldpp_results* results) { delete results; }

void ldpp_string_free(char* text) { delete[] text; }

}  // extern "C"
