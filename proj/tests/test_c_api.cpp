// Exercises the shared-library C interface the way an external binding
// would: through strings, opaque handles, and status codes only.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "ldp_poison.h"

namespace {

int failures = 0;

void check(bool ok, const char* what) {
  if (!ok) {
    std::fprintf(stderr, "FAILED: %s (last error: %s)\n", what,
                 ldpp_last_error());
    ++failures;
  }
}

void test_version_and_status_names() {
  check(ldpp_version() != nullptr && ldpp_version()[0] != '\0', "version");
  check(std::strcmp(ldpp_status_name(LDPP_OK), "ok") == 0, "status name ok");
  check(ldpp_status_name(LDPP_ERR_PARAMETER) != nullptr,
        "status name parameter");
}

void test_config_defaults() {
  ldpp_experiment_config config;
  ldpp_experiment_config_init(&config);
  check(std::strcmp(config.protocol, "oue") == 0, "default protocol");
  check(std::strcmp(config.attack, "mga") == 0, "default attack");
  check(std::strcmp(config.defense, "none") == 0, "default defense");
  check(std::strcmp(config.dataset, "zipf") == 0, "default dataset");
  check(config.beta == 0.05, "default beta");
  check(config.r == 1, "default r");
  check(config.f_t == 0.01, "default f_t");
  check(config.epsilon == 1.0, "default epsilon");
  check(config.k == 20 && config.g == 10, "default k and g");
  check(config.trials == 20, "default trials");
  check(config.master_seed == 1, "default seed");
  check(config.d == 1024, "default d");
  check(config.n == 100000, "default n");
}

void test_theoretical_gain() {
  double gain = 0.0;
  ldpp_status status =
      ldpp_theoretical_gain("krr", "mga", 0.05, 1, 0.01, 1.0, 102, &gain);
  check(status == LDPP_OK, "theoretical gain status");
  check(std::fabs(gain - 2.98847) < 1e-4, "theoretical gain value");

  status = ldpp_theoretical_gain("bogus", "mga", 0.05, 1, 0.01, 1.0, 102,
                                 &gain);
  check(status == LDPP_ERR_PARAMETER, "bad protocol is a parameter error");
  check(std::strlen(ldpp_last_error()) > 0, "error message populated");

  status = ldpp_theoretical_gain("oue", "mga", 0.05, 1, 0.01, -1.0, 102,
                                 &gain);
  check(status == LDPP_ERR_PARAMETER, "bad epsilon is a parameter error");
}

void test_check_theorems() {
  int ok = 0;
  char violation[256] = {0};
  ldpp_status status = ldpp_check_theorems(&ok, violation, sizeof violation);
  check(status == LDPP_OK, "check theorems status");
  check(ok == 1, "theorems hold");
}

void test_dataset_roundtrip() {
  ldpp_dataset* dataset = nullptr;
  ldpp_status status = ldpp_dataset_zipf(64, 5000, 1.5, 9, &dataset);
  check(status == LDPP_OK, "zipf dataset status");
  uint32_t d = 0;
  uint64_t n = 0;
  check(ldpp_dataset_dims(dataset, &d, &n) == LDPP_OK, "dims status");
  check(d == 64 && n == 5000, "dims values");

  const char* path = "/tmp/ldplab_capi_ds.dat";
  check(ldpp_dataset_save(dataset, path) == LDPP_OK, "save status");
  ldpp_dataset* loaded = nullptr;
  check(ldpp_dataset_load(path, &loaded) == LDPP_OK, "load status");
  uint32_t d2 = 0;
  uint64_t n2 = 0;
  ldpp_dataset_dims(loaded, &d2, &n2);
  check(d2 == d && n2 == n, "round-trip dims");
  ldpp_dataset_free(dataset);
  ldpp_dataset_free(loaded);
  std::remove(path);

  check(ldpp_dataset_load("/tmp/ldplab_no_such.dat", &loaded) == LDPP_ERR_IO,
        "missing file is an io error");
}

void test_csv_ingestion() {
  const char* path = "/tmp/ldplab_capi.csv";
  std::FILE* f = std::fopen(path, "w");
  std::fputs("year,color\n2020,red\n2020,blue\n2021,red\n2020,red\n", f);
  std::fclose(f);

  ldpp_dataset* dataset = nullptr;
  ldpp_status status =
      ldpp_dataset_from_csv(path, "color", "year", "2020", 0, &dataset);
  check(status == LDPP_OK, "csv ingest status");
  uint32_t d = 0;
  uint64_t n = 0;
  ldpp_dataset_dims(dataset, &d, &n);
  check(d == 2 && n == 3, "csv ingest dims");
  ldpp_dataset_free(dataset);

  status = ldpp_dataset_from_csv(path, "nope", "", "", 0, &dataset);
  check(status == LDPP_ERR_INGESTION, "unknown column is an ingestion error");
  std::remove(path);
}

void test_frequency_experiment() {
  ldpp_experiment_config config;
  ldpp_experiment_config_init(&config);
  config.d = 32;
  config.n = 2000;
  config.trials = 2;
  config.f_t = 0.02;
  config.sweep_param = "epsilon";
  config.sweep_values = "0.5,1.0";

  ldpp_results* results = nullptr;
  ldpp_status status = ldpp_run_frequency_experiment(&config, &results);
  check(status == LDPP_OK, "frequency experiment status");
  if (status != LDPP_OK) return;
  check(ldpp_results_count(results) == 2, "frequency experiment rows");

  ldpp_result_row row;
  check(ldpp_results_row(results, 0, &row) == LDPP_OK, "row status");
  check(std::strcmp(row.protocol, "oue") == 0, "row protocol");
  check(std::strcmp(row.sweep_param, "epsilon") == 0, "row sweep param");
  check(row.sweep_value == 0.5, "row sweep value");
  check(row.n == 2000, "row n");
  check(std::isfinite(row.empirical_gain_mean), "row gain finite");
  check(std::isnan(row.success_rate), "row success is nan");
  check(ldpp_results_row(results, 5, &row) == LDPP_ERR_PARAMETER,
        "row index bounds");

  const char* out_dir = "/tmp/ldplab_capi_out";
  check(ldpp_results_write(results, out_dir, "both") == LDPP_OK,
        "write status");
  std::string csv = std::string(out_dir) + "/results.csv";
  std::FILE* f = std::fopen(csv.c_str(), "r");
  check(f != nullptr, "csv file exists");
  if (f) std::fclose(f);

  char* json = nullptr;
  check(ldpp_results_to_json(results, &json) == LDPP_OK, "json status");
  check(json != nullptr && std::strstr(json, "\"records\"") != nullptr,
        "json content");
  ldpp_string_free(json);
  ldpp_results_free(results);
}

void test_heavy_hitter_experiment() {
  ldpp_experiment_config config;
  ldpp_experiment_config_init(&config);
  config.d = 64;
  config.n = 3000;
  config.k = 4;
  config.g = 2;
  config.epsilon = 4.0;
  config.trials = 1;
  config.r = 1;

  ldpp_results* results = nullptr;
  ldpp_status status = ldpp_run_hh_experiment(&config, &results);
  check(status == LDPP_OK, "hh experiment status");
  if (status != LDPP_OK) return;
  check(ldpp_results_count(results) == 1, "hh rows");
  ldpp_result_row row;
  ldpp_results_row(results, 0, &row);
  check(std::strcmp(row.protocol, "olh") == 0, "hh protocol is olh");
  check(row.success_rate >= 0.0 && row.success_rate <= 1.0,
        "hh success in range");
  check(std::isnan(row.theoretical_gain), "hh theoretical is nan");
  ldpp_results_free(results);
}

void test_error_paths() {
  ldpp_experiment_config config;
  ldpp_experiment_config_init(&config);
  config.protocol = "krr";
  config.defense = "detect";
  config.d = 16;
  config.n = 500;
  config.trials = 1;
  ldpp_results* results = nullptr;
  ldpp_status status = ldpp_run_frequency_experiment(&config, &results);
  check(status == LDPP_ERR_NOT_APPLICABLE, "krr detect refusal");
  check(std::strstr(ldpp_last_error(), "krr") != nullptr,
        "refusal message names the protocol");

  ldpp_experiment_config_init(&config);
  config.protocol = "zzz";
  status = ldpp_run_frequency_experiment(&config, &results);
  check(status == LDPP_ERR_PARAMETER, "unknown protocol");

  ldpp_experiment_config_init(&config);
  config.sweep_param = "r";
  config.sweep_values = "1,abc";
  status = ldpp_run_frequency_experiment(&config, &results);
  check(status == LDPP_ERR_PARAMETER, "malformed sweep values");

  ldpp_experiment_config_init(&config);
  config.dataset = "csv:/tmp/missing.csv";  // missing the column part
  status = ldpp_run_frequency_experiment(&config, &results);
  check(status == LDPP_ERR_PARAMETER, "malformed dataset source");

  check(ldpp_run_frequency_experiment(nullptr, &results) ==
            LDPP_ERR_PARAMETER,
        "null config");
  check(ldpp_theoretical_gain("oue", "mga", 0.05, 1, 0.01, 1.0, 64, nullptr) ==
            LDPP_ERR_PARAMETER,
        "null out pointer");
}

}  // namespace

int main() {
  test_version_and_status_names();
  test_config_defaults();
  test_theoretical_gain();
  test_check_theorems();
  test_dataset_roundtrip();
  test_csv_ingestion();
  test_frequency_experiment();
  test_heavy_hitter_experiment();
  test_error_paths();
  if (failures == 0) {
    std::printf("all c api checks passed\n");
    return 0;
  }
  std::fprintf(stderr, "%d c api check(s) failed\n", failures);
  return 1;
}
