#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldplab/errors.hpp"
#include "ldplab/rng.hpp"

namespace ldplab {

struct Dataset {
  uint32_t d = 0;
  std::vector<uint32_t> user_items;  // one 1-indexed item per user
  std::vector<double> true_freq;     // true_freq[v - 1], sums to 1
  std::vector<std::string> labels;   // labels[v - 1]; empty labels mean "item <v>"

  uint64_t n() const { return user_items.size(); }
};

struct ZipfConfig {
  uint32_t d = 1024;
  uint64_t n = 100000;
  double exponent = 1.5;
};

// Population whose item ranks follow a Zipf law: item v is drawn with
// probability proportional to v^-exponent.
Dataset synth_zipf(const ZipfConfig& config, RngStream& rng);

struct CsvIngestOptions {
  std::string filter_column;  // keep only rows where this column equals
  std::string filter_value;   // filter_value; empty column means no filter
  uint64_t max_rows = 0;      // 0 means read everything
};

// Reads one column of a headered CSV file into a dataset. Distinct cell
// values become items, numbered by first appearance; rows with an empty cell
// in the chosen column are skipped and counted in `skipped` when given.
Dataset ingest_csv(const std::string& path, const std::string& column,
                   const CsvIngestOptions& options = {},
                   uint64_t* skipped = nullptr);

// Writes a dataset in the plain interchange format: a header line
// "d=<d> n=<n>" followed by one item index per line.
void export_dataset(const Dataset& dataset, const std::string& path);

Dataset import_dataset(const std::string& path);

// The k most frequent items, ties broken toward the smaller index.
std::vector<uint32_t> true_top_k(const Dataset& dataset, uint32_t k);

}  // namespace ldplab
