#include "ldplab/defenses.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "ldplab/errors.hpp"
#include "ldplab/hash.hpp"
#include "ldplab/numeric.hpp"

namespace ldplab {

const char* defense_name(DefenseMode mode) {
  switch (mode) {
    case DefenseMode::None: return "none";
    case DefenseMode::Normalize: return "normalize";
    case DefenseMode::Detect: return "detect";
    case DefenseMode::Both: return "both";
  }
  return "unknown";
}

NormalizeResult normalize(const FrequencyEstimate& estimate) {
  const std::vector<double>& f = estimate.values;
  if (f.size() < 2)
    fail(ErrorCode::Parameter, "normalize needs at least two items");
  double min = *std::min_element(f.begin(), f.end());
  double denom = 0.0;
  for (double v : f) denom += v - min;

  NormalizeResult result;
  result.estimate.values.resize(f.size());
  if (denom <= 0.0) {
    std::fill(result.estimate.values.begin(), result.estimate.values.end(),
              1.0 / static_cast<double>(f.size()));
    result.degenerate = true;
    return result;
  }
  for (size_t i = 0; i < f.size(); ++i)
    result.estimate.values[i] = (f[i] - min) / denom;
  return result;
}

IndicatorVectors build_indicator_vectors(const ProtocolSpec& spec,
                                         const std::vector<Report>& reports) {
  if (spec.kind == ProtocolKind::KRR)
    fail(ErrorCode::NotApplicable,
         "fake-user detection is not available for krr reports");
  IndicatorVectors vectors;
  vectors.d = spec.d;
  vectors.rows.reserve(reports.size());
  size_t words = words_for_bits(spec.d);
  for (const Report& report : reports) {
    validate_report(spec, report);
    if (spec.kind == ProtocolKind::OUE) {
      vectors.rows.push_back(report.bits);
    } else {
      std::vector<uint64_t> row(words, 0);
      for (uint32_t v = 1; v <= spec.d; ++v)
        if (hash_eval(report.seed, v, spec.d_prime) == report.value)
          set_bit(row, v - 1);
      vectors.rows.push_back(std::move(row));
    }
  }
  return vectors;
}

namespace {

// Per-item column bitsets over users: columns[v - 1] holds one bit per user.
struct Columns {
  size_t words = 0;
  std::vector<std::vector<uint64_t>> cols;
};

Columns build_columns(const IndicatorVectors& vectors) {
  Columns columns;
  size_t n = vectors.rows.size();
  columns.words = (n + 63) / 64;
  columns.cols.assign(vectors.d, std::vector<uint64_t>(columns.words, 0));
  for (size_t u = 0; u < n; ++u) {
    const std::vector<uint64_t>& row = vectors.rows[u];
    for (size_t w = 0; w < row.size(); ++w) {
      uint64_t word = row[w];
      while (word) {
        unsigned bit = std::countr_zero(word);
        size_t item = w * 64 + bit;
        if (item >= vectors.d)
          fail(ErrorCode::Parameter,
               "indicator vector sets a bit outside the domain");
        columns.cols[item][u >> 6] |= uint64_t{1} << (u & 63);
        word &= word - 1;
      }
    }
  }
  return columns;
}

uint64_t itemset_support(const Columns& columns,
                         const std::vector<uint32_t>& items) {
  uint64_t count = 0;
  for (size_t w = 0; w < columns.words; ++w) {
    uint64_t acc = columns.cols[items[0] - 1][w];
    for (size_t i = 1; i < items.size(); ++i)
      acc &= columns.cols[items[i] - 1][w];
    count += std::popcount(acc);
  }
  return count;
}

// Depth-first itemset search over the column bitsets. Each prefix keeps its
// supporter bitset alive while its extensions are scanned, so testing a
// candidate costs one AND-and-popcount pass over the prefix bits instead of
// intersecting every member column from scratch. Support is anti-monotone,
// meaning every prefix of a frequent itemset is itself frequent, so the walk
// reaches every frequent itemset and the output is complete.
class EclatMiner {
 public:
  EclatMiner(const Columns& columns, uint64_t base_support, uint32_t max_size)
      : columns_(columns), base_support_(base_support), max_size_(max_size) {}

  std::vector<ItemsetSupport> run(uint32_t d) {
    std::vector<ItemsetSupport> out;
    for (uint32_t v = 1; v <= d; ++v) {
      uint64_t support = itemset_support(columns_, {v});
      if (support >= base_support_) {
        out.push_back({{v}, support});
        items_.push_back(v);
      }
    }
    if (max_size_ >= 2) {
      out_ = &out;
      for (size_t i = 0; i + 1 < items_.size(); ++i) {
        prefix_.assign(1, items_[i]);
        extend(columns_.cols[items_[i] - 1], i + 1);
      }
      // Canonical order: by size, then lexicographically within a size.
      std::sort(out.begin(), out.end(),
                [](const ItemsetSupport& a, const ItemsetSupport& b) {
                  if (a.items.size() != b.items.size())
                    return a.items.size() < b.items.size();
                  return a.items < b.items;
                });
    }
    return out;
  }

 private:
  void extend(const std::vector<uint64_t>& prefix_bits, size_t next) {
    size_t depth = prefix_.size() - 1;
    if (depth == buffers_.size()) buffers_.emplace_back(columns_.words);
    std::vector<uint64_t>& child_bits = buffers_[depth];
    for (size_t i = next; i < items_.size(); ++i) {
      const std::vector<uint64_t>& col = columns_.cols[items_[i] - 1];
      uint64_t support = 0;
      for (size_t w = 0; w < columns_.words; ++w) {
        uint64_t masked = prefix_bits[w] & col[w];
        child_bits[w] = masked;
        support += std::popcount(masked);
      }
      if (support < base_support_) continue;
      prefix_.push_back(items_[i]);
      out_->push_back({prefix_, support});
      if (prefix_.size() < max_size_ && i + 1 < items_.size())
        extend(child_bits, i + 1);
      prefix_.pop_back();
    }
  }

  const Columns& columns_;
  uint64_t base_support_;
  uint32_t max_size_;
  std::vector<uint32_t> items_;
  std::vector<uint32_t> prefix_;
  // One scratch bitset per depth. A deque keeps references to existing
  // buffers valid when a deeper level appends its own.
  std::deque<std::vector<uint64_t>> buffers_;
  std::vector<ItemsetSupport>* out_ = nullptr;
};

std::vector<ItemsetSupport> mine_with_columns(const Columns& columns,
                                              uint32_t d,
                                              uint64_t base_support,
                                              uint32_t max_size) {
  return EclatMiner(columns, base_support, max_size).run(d);
}

}  // namespace

std::vector<ItemsetSupport> mine_frequent_itemsets(
    const IndicatorVectors& vectors, uint64_t base_support,
    uint32_t max_size) {
  if (base_support < 1)
    fail(ErrorCode::Parameter, "base_support must be at least 1");
  if (max_size < 1)
    fail(ErrorCode::Parameter, "max_size must be at least 1");
  if (vectors.d < 1) fail(ErrorCode::Parameter, "empty item domain");
  Columns columns = build_columns(vectors);
  return mine_with_columns(columns, vectors.d, base_support, max_size);
}

uint64_t oue_threshold(uint64_t n_total, const ProtocolSpec& spec, uint32_t z,
                       double eta) {
  if (spec.kind != ProtocolKind::OUE)
    fail(ErrorCode::Parameter, "oue_threshold needs an oue spec");
  if (z < 1) fail(ErrorCode::Parameter, "itemset size must be at least 1");
  if (!(eta > 0.0) || eta >= 1.0)
    fail(ErrorCode::Parameter, "eta must lie in (0, 1)");
  double n = static_cast<double>(n_total);
  double pq = spec.p * std::pow(spec.q, static_cast<double>(z) - 1.0);
  double mean = n * pq;
  double variance = mean * (1.0 - pq);
  double start = mean + std::sqrt(variance / eta);
  uint64_t tau = static_cast<uint64_t>(std::floor(start));
  tau = tau > 2 ? tau - 2 : 1;
  for (;; ++tau) {
    double gap = static_cast<double>(tau) - mean;
    if (gap > 0.0 && variance <= eta * gap * gap) return tau;
  }
}

uint64_t olh_threshold(uint64_t n_total, const ProtocolSpec& spec, uint32_t z,
                       double eta) {
  if (spec.kind != ProtocolKind::OLH)
    fail(ErrorCode::Parameter, "olh_threshold needs an olh spec");
  if (z < 1) fail(ErrorCode::Parameter, "itemset size must be at least 1");
  if (!(eta > 0.0) || eta >= 1.0)
    fail(ErrorCode::Parameter, "eta must lie in (0, 1)");
  double x = std::pow(spec.q, static_cast<double>(z) - 1.0);
  // Pr[Binomial(n_total, x) >= tau] decreases in tau; find the first tau at
  // or below eta. tau = n_total + 1 always qualifies (probability zero).
  uint64_t lo = 1, hi = n_total + 1;
  while (lo < hi) {
    uint64_t mid = lo + (hi - lo) / 2;
    if (binomial_tail_ge(n_total, x, mid) <= eta)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

namespace {

bool is_strict_subset(const std::vector<uint32_t>& small,
                      const std::vector<uint32_t>& big) {
  return small.size() < big.size() &&
         std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

DetectionOutcome detect_from_vectors(
    const IndicatorVectors& vectors, const ThresholdFn& threshold,
    const DetectionConfig& config,
    const std::vector<uint8_t>* ground_truth_fake) {
  size_t n = vectors.rows.size();
  if (n == 0) fail(ErrorCode::EmptyInput, "no reports to examine");
  if (ground_truth_fake && ground_truth_fake->size() != n)
    fail(ErrorCode::Parameter, "ground-truth labels must cover every report");

  uint64_t base_support =
      config.base_support != 0
          ? config.base_support
          : std::max<uint64_t>(
                1, static_cast<uint64_t>(std::ceil(
                       config.base_support_fraction * static_cast<double>(n))));

  Columns columns = build_columns(vectors);
  std::vector<ItemsetSupport> mined = mine_with_columns(
      columns, vectors.d, base_support, config.max_itemset_size);

  DetectionOutcome outcome;
  std::map<uint32_t, uint64_t> tau_cache;
  for (const ItemsetSupport& entry : mined) {
    uint32_t z = static_cast<uint32_t>(entry.items.size());
    auto [it, inserted] = tau_cache.try_emplace(z, 0);
    if (inserted) it->second = threshold(z);
    if (entry.support >= it->second) outcome.abnormal_itemsets.push_back(entry);
  }

  // Flag the supporters of maximal abnormal itemsets. An abnormal itemset
  // strictly contained in another abnormal itemset is explained by the larger
  // pattern; flagging its full supporter set would sweep in honest users who
  // happen to cover the fragment.
  std::vector<const ItemsetSupport*> maximal;
  for (const ItemsetSupport& a : outcome.abnormal_itemsets) {
    bool contained = false;
    for (const ItemsetSupport& b : outcome.abnormal_itemsets) {
      if (&a != &b && is_strict_subset(a.items, b.items)) {
        contained = true;
        break;
      }
    }
    if (!contained) maximal.push_back(&a);
  }

  std::vector<uint64_t> flag_bits(columns.words, 0);
  for (const ItemsetSupport* entry : maximal) {
    for (size_t w = 0; w < columns.words; ++w) {
      uint64_t acc = columns.cols[entry->items[0] - 1][w];
      for (size_t i = 1; i < entry->items.size(); ++i)
        acc &= columns.cols[entry->items[i] - 1][w];
      flag_bits[w] |= acc;
    }
  }
  for (size_t w = 0; w < columns.words; ++w) {
    uint64_t word = flag_bits[w];
    while (word) {
      unsigned bit = std::countr_zero(word);
      size_t user = w * 64 + bit;
      if (user < n) outcome.flagged_users.push_back(user);
      word &= word - 1;
    }
  }

  if (ground_truth_fake) {
    uint64_t genuine = 0, fake = 0, flagged_genuine = 0, flagged_fake = 0;
    size_t cursor = 0;
    for (size_t u = 0; u < n; ++u) {
      bool is_fake = (*ground_truth_fake)[u] != 0;
      bool flagged = cursor < outcome.flagged_users.size() &&
                     outcome.flagged_users[cursor] == u;
      if (flagged) ++cursor;
      if (is_fake) {
        ++fake;
        flagged_fake += flagged;
      } else {
        ++genuine;
        flagged_genuine += flagged;
      }
    }
    outcome.fpr = genuine == 0 ? 0.0
                               : static_cast<double>(flagged_genuine) /
                                     static_cast<double>(genuine);
    outcome.fnr = fake == 0 ? 0.0
                            : static_cast<double>(fake - flagged_fake) /
                                  static_cast<double>(fake);
  } else {
    outcome.fpr = std::numeric_limits<double>::quiet_NaN();
    outcome.fnr = std::numeric_limits<double>::quiet_NaN();
  }
  return outcome;
}

DetectionOutcome detect_fake_users(const ProtocolSpec& spec,
                                   const std::vector<Report>& reports,
                                   const DetectionConfig& config,
                                   const std::vector<uint8_t>* ground_truth_fake) {
  if (spec.kind == ProtocolKind::KRR)
    fail(ErrorCode::NotApplicable,
         "fake-user detection is not available for krr reports");
  IndicatorVectors vectors = build_indicator_vectors(spec, reports);
  uint64_t n_total = reports.size();
  ThresholdFn threshold = [&spec, n_total, &config](uint32_t z) {
    return spec.kind == ProtocolKind::OUE
               ? oue_threshold(n_total, spec, z, config.eta)
               : olh_threshold(n_total, spec, z, config.eta);
  };
  return detect_from_vectors(vectors, threshold, config, ground_truth_fake);
}

}  // namespace ldplab
