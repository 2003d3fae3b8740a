/* C interface to the LDP poisoning laboratory.
 *
 * All functions return ldpp_status; LDPP_OK means success. On failure,
 * ldpp_last_error() returns a thread-local message describing the problem.
 * Objects returned through out-parameters are owned by the caller and must
 * be released with the matching _free function. Strings inside
 * ldpp_result_row point into the results object and stay valid until it is
 * freed.
 */
#ifndef LDP_POISON_H
#define LDP_POISON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldpp_status {
  LDPP_OK = 0,
  LDPP_ERR_PARAMETER = 1,
  LDPP_ERR_DOMAIN = 2,
  LDPP_ERR_PROTOCOL = 3,
  LDPP_ERR_NOT_APPLICABLE = 4,
  LDPP_ERR_INGESTION = 5,
  LDPP_ERR_IO = 6,
  LDPP_ERR_EMPTY_INPUT = 7,
  LDPP_ERR_DEGENERATE_PARTITION = 8,
  LDPP_ERR_UNKNOWN = 9
} ldpp_status;

const char* ldpp_version(void);

/* Thread-local message for the most recent failure in this thread. */
const char* ldpp_last_error(void);

const char* ldpp_status_name(ldpp_status status);

/* ---- datasets ---------------------------------------------------------- */

typedef struct ldpp_dataset ldpp_dataset;

/* Zipf-distributed synthetic population. */
ldpp_status ldpp_dataset_zipf(uint32_t d, uint64_t n, double exponent,
                              uint64_t seed, ldpp_dataset** out);

/* One categorical column of a headered CSV file. filter_column/filter_value
 * may be NULL or empty for no filtering; max_rows 0 reads everything. */
ldpp_status ldpp_dataset_from_csv(const char* path, const char* column,
                                  const char* filter_column,
                                  const char* filter_value, uint64_t max_rows,
                                  ldpp_dataset** out);

/* Interchange format: header "d=<d> n=<n>", one item index per line. */
ldpp_status ldpp_dataset_load(const char* path, ldpp_dataset** out);
ldpp_status ldpp_dataset_save(const ldpp_dataset* dataset, const char* path);

ldpp_status ldpp_dataset_dims(const ldpp_dataset* dataset, uint32_t* d,
                              uint64_t* n);

void ldpp_dataset_free(ldpp_dataset* dataset);

/* ---- closed-form analysis ---------------------------------------------- */

/* protocol: "krr" | "oue" | "olh"; attack: "rpa" | "ria" | "mga". */
ldpp_status ldpp_theoretical_gain(const char* protocol, const char* attack,
                                  double beta, uint32_t r, double f_t,
                                  double epsilon, uint32_t d, double* out);

/* Verifies the monotonicity and protocol-comparison theorems on a built-in
 * parameter grid. *ok is 1 when every check passes. The violation buffer
 * (optional) receives the first failing point. */
ldpp_status ldpp_check_theorems(int* ok, char* violation, size_t violation_len);

/* ---- experiments -------------------------------------------------------- */

typedef struct ldpp_experiment_config {
  const char* protocol;      /* "krr" | "oue" | "olh" */
  const char* attack;        /* "rpa" | "ria" | "mga" */
  const char* defense;       /* "none" | "normalize" | "detect" | "both" */
  const char* dataset;       /* "zipf" | "csv:PATH:COLUMN" | "file:PATH" */
  const char* filter_column; /* optional CSV row filter, NULL for none */
  const char* filter_value;
  double beta;
  double f_t;
  double epsilon;
  double eta;
  double zipf_exponent;
  uint32_t r;
  uint32_t k;
  uint32_t g;
  uint32_t trials;
  uint32_t hash_candidates;
  uint32_t d;                /* zipf domain size */
  uint64_t n;                /* zipf population size */
  uint64_t master_seed;
  const char* sweep_param;   /* NULL or "" for no sweep */
  const char* sweep_values;  /* comma-separated numbers */
} ldpp_experiment_config;

/* Fills the defaults: oue, mga, no defense, zipf d=1024 n=100000,
 * beta=0.05, r=1, f_t=0.01, epsilon=1, k=20, g=10, trials=20, seed=1. */
void ldpp_experiment_config_init(ldpp_experiment_config* config);

typedef struct ldpp_results ldpp_results;

ldpp_status ldpp_run_frequency_experiment(const ldpp_experiment_config* config,
                                          ldpp_results** out);
ldpp_status ldpp_run_hh_experiment(const ldpp_experiment_config* config,
                                   ldpp_results** out);

typedef struct ldpp_result_row {
  const char* sweep_param;
  double sweep_value;
  const char* protocol;
  const char* attack;
  const char* defense;
  double beta;
  uint32_t r;
  double f_t;
  double epsilon;
  uint32_t k;
  uint32_t g;
  uint64_t n;
  uint32_t d;
  uint64_t m;
  uint32_t trials;
  uint64_t master_seed;
  double theoretical_gain;      /* NaN when not applicable */
  double empirical_gain_mean;
  double empirical_gain_stderr;
  double success_rate;
  double fpr;
  double fnr;
  double wall_clock_seconds;
} ldpp_result_row;

size_t ldpp_results_count(const ldpp_results* results);
ldpp_status ldpp_results_row(const ldpp_results* results, size_t index,
                             ldpp_result_row* out);

/* Writes results.csv and/or results.json under out_dir. format: "csv",
 * "json", or "both". */
ldpp_status ldpp_results_write(const ldpp_results* results,
                               const char* out_dir, const char* format);

/* JSON document as a heap string; release with ldpp_string_free. */
ldpp_status ldpp_results_to_json(const ldpp_results* results, char** out);

void ldpp_results_free(ldpp_results* results);
void ldpp_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LDP_POISON_H */
