#include "ldplab/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ldplab/errors.hpp"

namespace ldplab {

Dataset synth_zipf(const ZipfConfig& config, RngStream& rng) {
  if (config.d < 2)
    fail(ErrorCode::Parameter, "synth_zipf: domain size must be at least 2");
  if (config.n == 0)
    fail(ErrorCode::Parameter, "synth_zipf: population size must be positive");
  if (!(config.exponent >= 0.0) || !std::isfinite(config.exponent))
    fail(ErrorCode::Parameter, "synth_zipf: exponent must be finite and non-negative");

  std::vector<double> cdf(config.d);
  double total = 0.0;
  for (uint32_t v = 1; v <= config.d; ++v) {
    total += std::pow(static_cast<double>(v), -config.exponent);
    cdf[v - 1] = total;
  }
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;

  Dataset dataset;
  dataset.d = config.d;
  dataset.user_items.resize(config.n);
  std::vector<uint64_t> counts(config.d, 0);
  for (uint64_t i = 0; i < config.n; ++i) {
    double u = rng.next_double();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    uint32_t item = static_cast<uint32_t>(it - cdf.begin()) + 1;
    if (item > config.d) item = config.d;
    dataset.user_items[i] = item;
    counts[item - 1] += 1;
  }
  dataset.true_freq.resize(config.d);
  for (uint32_t v = 0; v < config.d; ++v)
    dataset.true_freq[v] =
        static_cast<double>(counts[v]) / static_cast<double>(config.n);
  return dataset;
}

namespace {

// Splits one CSV line into cells, honoring double-quoted fields with the
// usual "" escape.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

size_t find_column(const std::vector<std::string>& header,
                   const std::string& name, const std::string& path) {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(ErrorCode::Ingestion,
       "column '" + name + "' not found in " + path);
}

void recompute_frequencies(Dataset& dataset) {
  std::vector<uint64_t> counts(dataset.d, 0);
  for (uint32_t item : dataset.user_items) counts[item - 1] += 1;
  dataset.true_freq.resize(dataset.d);
  for (uint32_t v = 0; v < dataset.d; ++v)
    dataset.true_freq[v] = static_cast<double>(counts[v]) /
                           static_cast<double>(dataset.user_items.size());
}

}  // namespace

Dataset ingest_csv(const std::string& path, const std::string& column,
                   const CsvIngestOptions& options, uint64_t* skipped) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::Ingestion, "empty file: " + path);
  std::vector<std::string> header = split_csv_line(line);
  size_t col = find_column(header, column, path);
  size_t filter_col = 0;
  bool filtering = !options.filter_column.empty();
  if (filtering)
    filter_col = find_column(header, options.filter_column, path);

  Dataset dataset;
  std::unordered_map<std::string, uint32_t> item_of_label;
  uint64_t skipped_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (filtering &&
        (filter_col >= cells.size() || cells[filter_col] != options.filter_value))
      continue;
    const std::string& value = col < cells.size() ? cells[col] : "";
    if (value.empty()) {
      ++skipped_rows;
      continue;
    }
    auto [it, inserted] = item_of_label.try_emplace(
        value, static_cast<uint32_t>(dataset.labels.size()) + 1);
    if (inserted) dataset.labels.push_back(value);
    dataset.user_items.push_back(it->second);
    if (options.max_rows != 0 && dataset.user_items.size() >= options.max_rows)
      break;
  }
  if (skipped) *skipped = skipped_rows;
  if (dataset.user_items.empty())
    fail(ErrorCode::EmptyInput,
         "no usable records in " + path + " column '" + column + "'");
  dataset.d = static_cast<uint32_t>(dataset.labels.size());
  if (dataset.d < 2)
    fail(ErrorCode::Ingestion,
         "column '" + column + "' has fewer than two distinct values");
  recompute_frequencies(dataset);
  return dataset;
}

void export_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << "d=" << dataset.d << " n=" << dataset.n() << "\n";
  for (uint32_t item : dataset.user_items) out << item << "\n";
  if (!out) fail(ErrorCode::Io, "failed while writing " + path);
}

Dataset import_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::Ingestion, "empty file: " + path);
  uint32_t d = 0;
  uint64_t n = 0;
  if (std::sscanf(line.c_str(), "d=%u n=%llu", &d,
                  reinterpret_cast<unsigned long long*>(&n)) != 2)
    fail(ErrorCode::Ingestion, "malformed dataset header in " + path);
  if (d < 2) fail(ErrorCode::Ingestion, "dataset domain too small in " + path);

  Dataset dataset;
  dataset.d = d;
  dataset.user_items.reserve(n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    uint64_t item = 0;
    try {
      item = std::stoull(line);
    } catch (const std::exception&) {
      fail(ErrorCode::Ingestion, "malformed item line in " + path);
    }
    if (item < 1 || item > d)
      fail(ErrorCode::Ingestion, "item out of domain in " + path);
    dataset.user_items.push_back(static_cast<uint32_t>(item));
  }
  if (dataset.user_items.size() != n)
    fail(ErrorCode::Ingestion, "dataset header count mismatch in " + path);
  if (dataset.user_items.empty())
    fail(ErrorCode::EmptyInput, "dataset has no users: " + path);
  recompute_frequencies(dataset);
  return dataset;
}

std::vector<uint32_t> true_top_k(const Dataset& dataset, uint32_t k) {
  if (k == 0 || k > dataset.d)
    fail(ErrorCode::Parameter, "true_top_k: k must lie in [1, d]");
  std::vector<uint32_t> order(dataset.d);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return dataset.true_freq[a - 1] > dataset.true_freq[b - 1];
  });
  order.resize(k);
  return order;
}

}  // namespace ldplab
