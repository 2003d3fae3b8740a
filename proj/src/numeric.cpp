#include "ldplab/numeric.hpp"

#include <cmath>

#include "ldplab/errors.hpp"

namespace ldplab {

double log_choose(uint64_t n, uint64_t k) {
  if (k > n) fail(ErrorCode::Parameter, "log_choose: k exceeds n");
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

namespace {

// Sum of Pr[X = k] for k from `start` walking in direction `step` while the
// terms keep shrinking below relative 1e-22 of the running total. `start`
// must lie on the far side of the mode so the walk is monotone decreasing.
double sum_tail(uint64_t n, double log_x, double log_1mx, uint64_t start,
                int step) {
  double total = 0.0;
  int64_t k = static_cast<int64_t>(start);
  while (k >= 0 && k <= static_cast<int64_t>(n)) {
    double kk = static_cast<double>(k);
    double log_term = log_choose(n, static_cast<uint64_t>(k)) + kk * log_x +
                      (static_cast<double>(n) - kk) * log_1mx;
    double term = std::exp(log_term);
    total += term;
    if (term < total * 1e-22) break;
    k += step;
  }
  return total;
}

}  // namespace

double binomial_tail_ge(uint64_t n, double x, uint64_t a) {
  if (!(x == x) || x < 0.0 || x > 1.0)
    fail(ErrorCode::Parameter, "binomial_tail_ge: x must lie in [0, 1]");
  if (a == 0) return 1.0;
  if (a > n) return 0.0;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  double log_x = std::log(x);
  double log_1mx = std::log1p(-x);
  double mean = x * static_cast<double>(n);
  if (static_cast<double>(a) > mean) {
    // Upper tail summed directly, largest term first.
    return sum_tail(n, log_x, log_1mx, a, +1);
  }
  // Complement of the lower tail; its largest term sits at a - 1.
  double lower = sum_tail(n, log_x, log_1mx, a - 1, -1);
  double result = 1.0 - lower;
  return result < 0.0 ? 0.0 : result;
}

double regularized_incomplete_beta(double x, uint64_t a, uint64_t b) {
  if (a == 0 || b == 0)
    fail(ErrorCode::Parameter,
         "regularized_incomplete_beta: a and b must be positive integers");
  if (!(x == x) || x < 0.0 || x > 1.0)
    fail(ErrorCode::Parameter,
         "regularized_incomplete_beta: x must lie in [0, 1]");
  return binomial_tail_ge(a + b - 1, x, a);
}

}  // namespace ldplab
