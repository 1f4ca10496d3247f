#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "cuspcorr/common.hpp"

namespace cuspcorr {

// Weights k with dim S_k(SL_2(Z)) = 1; for each there is a unique normalized
// Hecke eigenform, realized here as Delta * E_{k-12}.
inline constexpr int kSupportedWeights[] = {12, 16, 18, 20, 22, 26};
bool weight_supported(int k);

// A level-1 Hecke eigenform: exact integer Fourier coefficients a(1..N) plus
// the normalized eigenvalues lambda(n) = a(n) / n^{(k-1)/2}.
class CuspForm {
 public:
  CuspForm(int weight, std::vector<mpz_class> a);

  int weight() const { return weight_; }
  i64 ncoeffs() const { return (i64)a_.size(); }
  const mpz_class& a(i64 n) const;
  double lambda(i64 n) const;
  const std::vector<double>& lambda_table() const { return lambda_; }

 private:
  int weight_;
  std::vector<mpz_class> a_;       // a_[n-1] = a(n)
  std::vector<double> lambda_;     // lambda_[n-1]
};

// Ramanujan tau coefficients via q * prod (1-q^n)^24, exact arithmetic.
CuspForm build_delta(i64 ncoeffs);

// The unique eigenform of weight k in {12,16,18,20,22,26}.
CuspForm build_form(int weight, i64 ncoeffs);

// a(n)/n^{(k-1)/2} rounded from extended precision.
double lambda_at(const CuspForm& form, i64 n);

// Exact integer Hecke relation a(m)a(n) = sum_{d|(m,n)} d^{k-1} a(mn/d^2)
// over all pairs with mn <= limit. Returns the number of violations.
i64 hecke_violations(const CuspForm& form, i64 limit);

// Exact Deligne check a(n)^2 <= d_2(n)^2 * n^{k-1} for n <= nmax.
// Returns the first violating n, or 0 if none.
i64 deligne_violation(const CuspForm& form, i64 nmax);

// Exact identity E_4^3 - E_6^2 = 1728 * Delta through `trunc` coefficients.
bool eisenstein_identity_ok(std::size_t trunc);

// Coefficient cache: magic "CUSP", u16 version, u16 weight, u64 N, then per
// coefficient a sign byte, a u32 magnitude byte length, and little-endian
// magnitude bytes.
void write_cache(const CuspForm& form, const std::string& path);
CuspForm read_cache(const std::string& path);
struct CacheInfo {
  int version;
  int weight;
  u64 ncoeffs;
};
CacheInfo cache_info(const std::string& path);

// Recomputes a seeded sample (about 1%) of coefficients from the prime
// values via the Hecke recurrence and compares exactly.
i64 cache_verify_sample(const CuspForm& form, u64 seed);

}  // namespace cuspcorr
