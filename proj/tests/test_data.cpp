#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "ldplab/data.hpp"
#include "ldplab/rng.hpp"

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/ldplab_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("zipf synthesis is deterministic and well formed") {
  ldplab::ZipfConfig config;
  config.d = 102;
  config.n = 20000;
  config.exponent = 1.5;
  ldplab::RngStream a(9), b(9);
  ldplab::Dataset da = ldplab::synth_zipf(config, a);
  ldplab::Dataset db = ldplab::synth_zipf(config, b);
  CHECK(da.user_items == db.user_items);
  CHECK(da.d == 102);
  CHECK(da.n() == 20000);
  double total = 0;
  for (double f : da.true_freq) total += f;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (uint32_t item : da.user_items) {
    CHECK(item >= 1);
    CHECK(item <= 102);
  }
}

TEST_CASE("zipf rank-one frequency matches the harmonic normalization") {
  // With exponent 1.5 and d=102, the expected share of rank 1 is
  // 1 / sum_{v=1}^{102} v^{-1.5} which is approximately 0.4141.
  double h = 0;
  for (int v = 1; v <= 102; ++v) h += std::pow(v, -1.5);
  double expect = 1.0 / h;
  CHECK(expect == doctest::Approx(0.4141).epsilon(0.01));

  ldplab::ZipfConfig config;
  config.d = 102;
  config.n = 200000;
  config.exponent = 1.5;
  ldplab::RngStream rng(5);
  ldplab::Dataset data = ldplab::synth_zipf(config, rng);
  double sigma = std::sqrt(expect * (1 - expect) / config.n);
  CHECK(std::abs(data.true_freq[0] - expect) < 4 * sigma);
}

TEST_CASE("zipf exponent zero degenerates to uniform sampling") {
  ldplab::ZipfConfig config;
  config.d = 16;
  config.n = 160000;
  config.exponent = 0.0;
  ldplab::RngStream rng(3);
  ldplab::Dataset data = ldplab::synth_zipf(config, rng);
  for (double f : data.true_freq) {
    double sigma = std::sqrt((1.0 / 16) * (15.0 / 16) / config.n);
    CHECK(std::abs(f - 1.0 / 16) < 4 * sigma);
  }
}

TEST_CASE("zipf rejects bad configuration") {
  ldplab::RngStream rng(1);
  ldplab::ZipfConfig config;
  config.d = 1;
  CHECK_THROWS_AS(ldplab::synth_zipf(config, rng), ldplab::Error);
  config.d = 10;
  config.n = 0;
  CHECK_THROWS_AS(ldplab::synth_zipf(config, rng), ldplab::Error);
}

TEST_CASE("csv ingestion maps labels and counts frequencies") {
  std::string path = write_temp(
      "basic.csv", "id,color\n1,a\n2,b\n3,a\n4,c\n");
  ldplab::CsvIngestOptions options;
  uint64_t skipped = 0;
  ldplab::Dataset data = ldplab::ingest_csv(path, "color", options, &skipped);
  CHECK(data.d == 3);
  CHECK(data.n() == 4);
  CHECK(skipped == 0);
  CHECK(data.labels == std::vector<std::string>({"a", "b", "c"}));
  CHECK(data.true_freq[0] == doctest::Approx(0.5));
  CHECK(data.true_freq[1] == doctest::Approx(0.25));
  CHECK(data.true_freq[2] == doctest::Approx(0.25));
  CHECK(data.user_items == std::vector<uint32_t>({1, 2, 1, 3}));
  std::remove(path.c_str());
}

TEST_CASE("csv ingestion honors a row filter") {
  std::string path = write_temp(
      "filter.csv",
      "year,city,color\n2020,ny,a\n2020,la,b\n2021,ny,a\n2020,ny,c\n");
  ldplab::CsvIngestOptions options;
  options.filter_column = "year";
  options.filter_value = "2020";
  ldplab::Dataset data = ldplab::ingest_csv(path, "color", options, nullptr);
  CHECK(data.n() == 3);
  CHECK(data.d == 3);
  CHECK(data.labels == std::vector<std::string>({"a", "b", "c"}));
  std::remove(path.c_str());
}

TEST_CASE("csv ingestion skips empty cells and reports them") {
  // The second row has an empty value in the selected column and must be
  // counted; the blank line is not a record at all.
  std::string path = write_temp(
      "empty.csv", "id,v\n1,a\n2,\n\n3,b\n4,a\n");
  ldplab::CsvIngestOptions options;
  uint64_t skipped = 0;
  ldplab::Dataset data = ldplab::ingest_csv(path, "v", options, &skipped);
  CHECK(data.n() == 3);
  CHECK(skipped == 1);
  std::remove(path.c_str());
}

TEST_CASE("csv ingestion handles quoted fields") {
  std::string path = write_temp(
      "quoted.csv", "v\n\"hello, world\"\n\"say \"\"hi\"\"\"\nplain\n");
  ldplab::CsvIngestOptions options;
  ldplab::Dataset data = ldplab::ingest_csv(path, "v", options, nullptr);
  CHECK(data.d == 3);
  CHECK(data.labels[0] == "hello, world");
  CHECK(data.labels[1] == "say \"hi\"");
  CHECK(data.labels[2] == "plain");
  std::remove(path.c_str());
}

TEST_CASE("csv ingestion error cases") {
  ldplab::CsvIngestOptions options;
  CHECK_THROWS_AS(
      ldplab::ingest_csv("/tmp/ldplab_no_such_file.csv", "v", options, nullptr),
      ldplab::Error);

  std::string empty = write_temp("totally_empty.csv", "");
  CHECK_THROWS_AS(ldplab::ingest_csv(empty, "v", options, nullptr),
                  ldplab::Error);
  std::remove(empty.c_str());

  std::string no_column = write_temp("no_column.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(ldplab::ingest_csv(no_column, "zz", options, nullptr),
                  ldplab::Error);
  std::remove(no_column.c_str());

  std::string header_only = write_temp("header_only.csv", "v\n");
  CHECK_THROWS_AS(ldplab::ingest_csv(header_only, "v", options, nullptr),
                  ldplab::Error);
  std::remove(header_only.c_str());

  // A single distinct label leaves no domain to estimate over.
  std::string one_label = write_temp("one_label.csv", "v\na\na\n");
  CHECK_THROWS_AS(ldplab::ingest_csv(one_label, "v", options, nullptr),
                  ldplab::Error);
  std::remove(one_label.c_str());
}

TEST_CASE("dataset export and import round trip") {
  ldplab::ZipfConfig config;
  config.d = 50;
  config.n = 5000;
  ldplab::RngStream rng(21);
  ldplab::Dataset data = ldplab::synth_zipf(config, rng);
  std::string path = "/tmp/ldplab_test_roundtrip.dat";
  ldplab::export_dataset(data, path);
  ldplab::Dataset loaded = ldplab::import_dataset(path);
  CHECK(loaded.d == data.d);
  CHECK(loaded.user_items == data.user_items);
  for (uint32_t v = 0; v < data.d; ++v)
    CHECK(loaded.true_freq[v] == doctest::Approx(data.true_freq[v]));
  std::remove(path.c_str());
}

TEST_CASE("import rejects malformed files") {
  std::string bad_header = write_temp("bad_header.dat", "bogus\n1\n2\n");
  CHECK_THROWS_AS(ldplab::import_dataset(bad_header), ldplab::Error);
  std::remove(bad_header.c_str());

  std::string short_body = write_temp("short_body.dat", "d=4 n=3\n1\n2\n");
  CHECK_THROWS_AS(ldplab::import_dataset(short_body), ldplab::Error);
  std::remove(short_body.c_str());

  std::string out_of_range = write_temp("oor.dat", "d=4 n=2\n1\n9\n");
  CHECK_THROWS_AS(ldplab::import_dataset(out_of_range), ldplab::Error);
  std::remove(out_of_range.c_str());
}

TEST_CASE("true_top_k ranks by frequency with ties to the smaller index") {
  ldplab::Dataset data;
  data.d = 5;
  data.user_items = {1, 1, 2, 2, 3, 4, 5};
  data.true_freq = {2.0 / 7, 2.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7};
  std::vector<uint32_t> top = ldplab::true_top_k(data, 3);
  CHECK(top == std::vector<uint32_t>({1, 2, 3}));
  CHECK_THROWS_AS(ldplab::true_top_k(data, 10), ldplab::Error);
  CHECK_THROWS_AS(ldplab::true_top_k(data, 0), ldplab::Error);
}
