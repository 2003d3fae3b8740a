#include "ldplab/protocols.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "ldplab/errors.hpp"
#include "ldplab/hash.hpp"

namespace ldplab {

const char* protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::KRR: return "krr";
    case ProtocolKind::OUE: return "oue";
    case ProtocolKind::OLH: return "olh";
  }
  return "unknown";
}

ProtocolSpec derive_params(ProtocolKind kind, double epsilon, uint32_t d) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    fail(ErrorCode::Parameter, "derive_params: epsilon must be positive and finite");
  if (d < 2) fail(ErrorCode::Parameter, "derive_params: domain size must be at least 2");

  ProtocolSpec spec;
  spec.kind = kind;
  spec.epsilon = epsilon;
  spec.d = d;
  double e_eps = std::exp(epsilon);
  switch (kind) {
    case ProtocolKind::KRR:
      spec.p = e_eps / (static_cast<double>(d) - 1.0 + e_eps);
      spec.q = 1.0 / (static_cast<double>(d) - 1.0 + e_eps);
      break;
    case ProtocolKind::OUE:
      spec.p = 0.5;
      spec.q = 1.0 / (e_eps + 1.0);
      break;
    case ProtocolKind::OLH: {
      spec.d_prime = static_cast<uint32_t>(std::ceil(e_eps + 1.0));
      double dp = static_cast<double>(spec.d_prime);
      spec.p_prime = e_eps / (e_eps + dp - 1.0);
      spec.q_prime = 1.0 / (e_eps + dp - 1.0);
      spec.p = spec.p_prime;
      spec.q = 1.0 / dp;
      break;
    }
  }
  return spec;
}

void validate_report(const ProtocolSpec& spec, const Report& report) {
  if (report.kind != spec.kind)
    fail(ErrorCode::Protocol, "report kind does not match the protocol");
  switch (spec.kind) {
    case ProtocolKind::KRR:
      if (report.item < 1 || report.item > spec.d)
        fail(ErrorCode::Protocol, "krr report item out of domain");
      break;
    case ProtocolKind::OUE:
      if (report.bits.size() != words_for_bits(spec.d))
        fail(ErrorCode::Protocol, "oue report has the wrong bit width");
      if (spec.d % 64 != 0) {
        uint64_t tail_mask = ~((uint64_t{1} << (spec.d % 64)) - 1);
        if (report.bits.back() & tail_mask)
          fail(ErrorCode::Protocol, "oue report sets bits beyond the domain");
      }
      break;
    case ProtocolKind::OLH:
      if (report.value < 1 || report.value > spec.d_prime)
        fail(ErrorCode::Protocol, "olh report value out of hash range");
      if (spec.seed_range != 0 && report.seed >= spec.seed_range)
        fail(ErrorCode::Protocol, "olh report seed out of range");
      break;
  }
}

Report perturb(const ProtocolSpec& spec, uint32_t item, RngStream& rng) {
  if (item < 1 || item > spec.d)
    fail(ErrorCode::Parameter, "perturb: item out of domain");

  Report report;
  report.kind = spec.kind;
  switch (spec.kind) {
    case ProtocolKind::KRR:
      if (rng.bernoulli(spec.p)) {
        report.item = item;
      } else {
        uint32_t other = static_cast<uint32_t>(rng.uniform_int(spec.d - 1)) + 1;
        report.item = other < item ? other : other + 1;
      }
      break;
    case ProtocolKind::OUE:
      report.bits.assign(words_for_bits(spec.d), 0);
      for (uint32_t v = 1; v <= spec.d; ++v) {
        double keep = (v == item) ? spec.p : spec.q;
        if (rng.bernoulli(keep)) set_bit(report.bits, v - 1);
      }
      break;
    case ProtocolKind::OLH: {
      report.seed = static_cast<uint32_t>(rng.uniform_int(spec.seed_range));
      uint32_t h = hash_eval(report.seed, item, spec.d_prime);
      if (rng.bernoulli(spec.p_prime)) {
        report.value = h;
      } else {
        uint32_t other =
            static_cast<uint32_t>(rng.uniform_int(spec.d_prime - 1)) + 1;
        report.value = other < h ? other : other + 1;
      }
      break;
    }
  }
  return report;
}

std::vector<uint32_t> support(const ProtocolSpec& spec, const Report& report) {
  validate_report(spec, report);
  std::vector<uint32_t> items;
  switch (spec.kind) {
    case ProtocolKind::KRR:
      items.push_back(report.item);
      break;
    case ProtocolKind::OUE:
      for (size_t w = 0; w < report.bits.size(); ++w) {
        uint64_t word = report.bits[w];
        while (word) {
          unsigned bit = std::countr_zero(word);
          items.push_back(static_cast<uint32_t>(w * 64 + bit) + 1);
          word &= word - 1;
        }
      }
      break;
    case ProtocolKind::OLH:
      for (uint32_t v = 1; v <= spec.d; ++v)
        if (hash_eval(report.seed, v, spec.d_prime) == report.value)
          items.push_back(v);
      break;
  }
  return items;
}

std::vector<uint64_t> support_counts(const ProtocolSpec& spec,
                                     const std::vector<Report>& reports) {
  std::vector<uint64_t> counts(spec.d, 0);
  for (const Report& report : reports) {
    validate_report(spec, report);
    switch (spec.kind) {
      case ProtocolKind::KRR:
        counts[report.item - 1] += 1;
        break;
      case ProtocolKind::OUE:
        for (size_t w = 0; w < report.bits.size(); ++w) {
          uint64_t word = report.bits[w];
          while (word) {
            unsigned bit = std::countr_zero(word);
            counts[w * 64 + bit] += 1;
            word &= word - 1;
          }
        }
        break;
      case ProtocolKind::OLH:
        for (uint32_t v = 1; v <= spec.d; ++v)
          if (hash_eval(report.seed, v, spec.d_prime) == report.value)
            counts[v - 1] += 1;
        break;
    }
  }
  return counts;
}

FrequencyEstimate aggregate_from_counts(const ProtocolSpec& spec,
                                        const std::vector<uint64_t>& counts,
                                        uint64_t n_total) {
  if (n_total == 0)
    fail(ErrorCode::EmptyInput, "aggregate: population size must be positive");
  if (counts.size() != spec.d)
    fail(ErrorCode::Parameter, "aggregate: counts width does not match the domain");
  FrequencyEstimate estimate;
  estimate.values.resize(spec.d);
  double n = static_cast<double>(n_total);
  double denom = spec.p - spec.q;
  for (uint32_t v = 0; v < spec.d; ++v)
    estimate.values[v] = (static_cast<double>(counts[v]) / n - spec.q) / denom;
  return estimate;
}

FrequencyEstimate aggregate(const ProtocolSpec& spec,
                            const std::vector<Report>& reports,
                            uint64_t n_total) {
  if (reports.empty())
    fail(ErrorCode::EmptyInput, "aggregate: no reports given");
  return aggregate_from_counts(spec, support_counts(spec, reports), n_total);
}

}  // namespace ldplab
