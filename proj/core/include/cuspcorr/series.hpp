#pragma once

#include <gmpxx.h>

#include <vector>

#include "cuspcorr/common.hpp"

namespace cuspcorr {

// Truncated integer power series, coefficient of q^i at index i.
using ZSeries = std::vector<mpz_class>;

// Product truncated to `trunc` coefficients. Multiplication is done by
// Kronecker substitution: coefficients are packed into one big integer per
// operand (sign-split into nonnegative parts) and multiplied with GMP, so
// the cost is a handful of quasi-linear big-integer products instead of an
// O(N^2) coefficient loop.
ZSeries series_mul(const ZSeries& a, const ZSeries& b, std::size_t trunc);
ZSeries series_sqr(const ZSeries& a, std::size_t trunc);

// prod_{n>=1} (1 - q^n), truncated: the pentagonal-number expansion.
ZSeries eta_series(std::size_t trunc);

// Normalized Eisenstein series E_4 = 1 + 240 sum sigma_3(n) q^n and
// E_6 = 1 - 504 sum sigma_5(n) q^n.
ZSeries eisenstein4(std::size_t trunc);
ZSeries eisenstein6(std::size_t trunc);

}  // namespace cuspcorr
