#pragma once

#include <string>
#include <vector>

#include "cuspcorr/common.hpp"
#include "cuspcorr/forms.hpp"

namespace cuspcorr {

// A real-valued arithmetic function tabulated on [lo, hi].
struct ArithTable {
  i64 lo = 1;
  i64 hi = 0;
  std::vector<double> values;  // values[n - lo]
  std::string label;

  i64 size() const { return hi - lo + 1; }
  double at(i64 n) const {
    if (n < lo || n > hi) throw parameter_error("ArithTable index out of range");
    return values[(std::size_t)(n - lo)];
  }
  double at_or_zero(i64 n) const {
    return (n < lo || n > hi) ? 0.0 : values[(std::size_t)(n - lo)];
  }
  double& ref(i64 n) { return values[(std::size_t)(n - lo)]; }
};

ArithTable make_table(i64 lo, i64 hi, const std::string& label);

// Primes up to n by Eratosthenes.
std::vector<i64> primes_upto(i64 n);

// von Mangoldt Lambda on [lo, hi], segmented sieve.
ArithTable sieve_vonmangoldt(i64 lo, i64 hi);

// Lambda_f(p^j) = (alpha_p^j + beta_p^j) log p via u_0 = 2, u_1 = lambda(p),
// u_j = lambda(p) u_{j-1} - u_{j-2}; zero off prime powers.
ArithTable lambda_f_table(const CuspForm& form, i64 lo, i64 hi);

// mu_f: multiplicative with mu_f(p) = -lambda(p), mu_f(p^2) = 1,
// mu_f(p^j) = 0 for j >= 3.
ArithTable mu_f_table(const CuspForm& form, i64 lo, i64 hi);

// lambda(n) * log(n) on [lo, hi] (the -L' coefficient array).
ArithTable lambda_log_table(const CuspForm& form, i64 lo, i64 hi);

// lambda(n) on [lo, hi].
ArithTable lambda_table(const CuspForm& form, i64 lo, i64 hi);

// lambda(n) * Lambda(n) on [lo, hi].
ArithTable lambda_vonmangoldt_table(const CuspForm& form, i64 lo, i64 hi);

struct ConvolutionReport {
  double max_abs_error = 0.0;
  i64 argmax = 0;
  double tol = 0.0;
  bool pass = false;
};

// Brute-force dirichlet convolution (g*h)(n) over divisors for n <= N against
// lhs(n); all three tables must start at 1.
ConvolutionReport convolution_check(const ArithTable& lhs, const ArithTable& g,
                                    const ArithTable& h, double tol);

// Dirichlet convolution of full tables on [1, N].
ArithTable dirichlet_convolve(const ArithTable& g, const ArithTable& h);

struct HeathBrownReport {
  double max_abs_deviation = 0.0;
  i64 argmax = 0;
  i64 terms = 0;
};

// Evaluates the L-fold binomial decomposition of Lambda_f against the sieved
// Lambda_f table for all n <= N (valid for N <= 2 z^L).
HeathBrownReport heath_brown_identity_check(const CuspForm& form, int L, i64 z, i64 N);

struct SingularSeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the neglected log-tail of the product
};

// Hardy-Littlewood singular series S(h), Euler product truncated at pmax.
SingularSeriesValue singular_series(i64 h, i64 pmax);

// m-fold divisor function d_m on [lo, hi] by segmented factorization.
ArithTable sieve_divisor(int m, i64 lo, i64 hi);

// Classical Moebius function on [1, hi].
ArithTable sieve_mobius(i64 hi);

}  // namespace cuspcorr
