#pragma once

#include <cstdint>

#include "ldplab/errors.hpp"

namespace ldplab {

// log of the binomial coefficient C(n, k).
double log_choose(uint64_t n, uint64_t k);

// Pr[Binomial(n, x) >= a], computed by exact summation in log space. The sum
// starts at the boundary term and walks away from the mode, so every term is
// no larger than its predecessor and the accumulation stays stable even deep
// in the tail.
double binomial_tail_ge(uint64_t n, double x, uint64_t a);

// Regularized incomplete beta function I(x; a, b) for positive integer a, b,
// evaluated through the identity I(x; a, b) = Pr[Binomial(a + b - 1, x) >= a].
double regularized_incomplete_beta(double x, uint64_t a, uint64_t b);

}  // namespace ldplab
