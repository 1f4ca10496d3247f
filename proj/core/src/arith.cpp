#include "cuspcorr/arith.hpp"

#include <algorithm>
#include <cmath>

namespace cuspcorr {

namespace {
constexpr i64 kSieveLimit = 100'000'000;
constexpr i64 kSegmentBudget = 1LL << 26;  // values per call, 512 MiB of doubles
}  // namespace

ArithTable make_table(i64 lo, i64 hi, const std::string& label) {
  if (lo < 1 || hi < lo) throw parameter_error("table range must satisfy 1 <= lo <= hi");
  ArithTable t;
  t.lo = lo;
  t.hi = hi;
  t.label = label;
  t.values.assign((std::size_t)(hi - lo + 1), 0.0);
  return t;
}

std::vector<i64> primes_upto(i64 n) {
  std::vector<i64> primes;
  if (n < 2) return primes;
  std::vector<bool> comp((std::size_t)n + 1, false);
  for (i64 p = 2; p <= n; ++p) {
    if (comp[(std::size_t)p]) continue;
    primes.push_back(p);
    for (i64 q = p * p; q <= n; q += p) comp[(std::size_t)q] = true;
  }
  return primes;
}

ArithTable sieve_vonmangoldt(i64 lo, i64 hi) {
  if (lo < 1 || hi < lo || hi > kSieveLimit)
    throw parameter_error("vonmangoldt range must satisfy 1 <= lo <= hi <= 1e8");
  if (hi - lo + 1 > kSegmentBudget) throw resource_error("segment too large");
  ArithTable t = make_table(lo, hi, "vonmangoldt");

  i64 root = (i64)std::sqrt((double)hi) + 1;
  while (root * root > hi) --root;
  std::vector<i64> primes = primes_upto(root);

  // Composite marking; what survives in [max(lo,2), hi] is prime.
  std::vector<bool> comp((std::size_t)(hi - lo + 1), false);
  for (i64 p : primes) {
    i64 start = std::max(p * p, ((lo + p - 1) / p) * p);
    for (i64 q = start; q <= hi; q += p) comp[(std::size_t)(q - lo)] = true;
  }
  for (i64 n = std::max<i64>(lo, 2); n <= hi; ++n)
    if (!comp[(std::size_t)(n - lo)]) t.ref(n) = std::log((double)n);
  // Prime powers p^j, j >= 2 (their base prime is always <= sqrt(hi)).
  for (i64 p : primes) {
    double lp = std::log((double)p);
    if (p >= lo && p <= hi) t.ref(p) = lp;
    i64 q = p;
    while (q <= hi / p) {
      q *= p;
      if (q >= lo) t.ref(q) = lp;
    }
  }
  return t;
}

ArithTable lambda_f_table(const CuspForm& form, i64 lo, i64 hi) {
  if (hi > form.ncoeffs()) throw parameter_error("range exceeds coefficient table");
  ArithTable t = make_table(lo, hi, "lambda_f");
  std::vector<i64> primes = primes_upto(hi);
  for (i64 p : primes) {
    double lp = std::log((double)p);
    double lam = form.lambda(p);
    double prev = 2.0, cur = lam;  // u_0, u_1
    if (p >= lo) t.ref(p) = cur * lp;
    i64 q = p;
    while (q <= hi / p) {
      q *= p;
      double nxt = lam * cur - prev;
      prev = cur;
      cur = nxt;
      if (q >= lo) t.ref(q) = cur * lp;
    }
  }
  return t;
}

ArithTable mu_f_table(const CuspForm& form, i64 lo, i64 hi) {
  if (hi > form.ncoeffs()) throw parameter_error("range exceeds coefficient table");
  ArithTable t = make_table(lo, hi, "mu_f");
  // Multiplicative build over [1, hi] via smallest prime factor.
  std::vector<std::int32_t> spf((std::size_t)hi + 1, 0);
  for (i64 p = 2; p <= hi; ++p) {
    if (spf[(std::size_t)p] != 0) continue;
    for (i64 q = p; q <= hi; q += p)
      if (spf[(std::size_t)q] == 0) spf[(std::size_t)q] = (std::int32_t)p;
  }
  std::vector<double> mu((std::size_t)hi + 1, 0.0);
  if (hi >= 1) mu[1] = 1.0;
  for (i64 n = 2; n <= hi; ++n) {
    i64 p = spf[(std::size_t)n];
    i64 m = n, e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    double factor = (e == 1) ? -form.lambda(p) : (e == 2 ? 1.0 : 0.0);
    mu[(std::size_t)n] = factor * mu[(std::size_t)m];
  }
  for (i64 n = lo; n <= hi; ++n) t.ref(n) = mu[(std::size_t)n];
  return t;
}

ArithTable lambda_log_table(const CuspForm& form, i64 lo, i64 hi) {
  if (hi > form.ncoeffs()) throw parameter_error("range exceeds coefficient table");
  ArithTable t = make_table(lo, hi, "lambda_log");
  for (i64 n = lo; n <= hi; ++n) t.ref(n) = form.lambda(n) * std::log((double)n);
  return t;
}

ArithTable lambda_table(const CuspForm& form, i64 lo, i64 hi) {
  if (hi > form.ncoeffs()) throw parameter_error("range exceeds coefficient table");
  ArithTable t = make_table(lo, hi, "lambda");
  for (i64 n = lo; n <= hi; ++n) t.ref(n) = form.lambda(n);
  return t;
}

ArithTable lambda_vonmangoldt_table(const CuspForm& form, i64 lo, i64 hi) {
  if (hi > form.ncoeffs()) throw parameter_error("range exceeds coefficient table");
  ArithTable vm = sieve_vonmangoldt(lo, hi);
  ArithTable t = make_table(lo, hi, "lambda_vonmangoldt");
  for (i64 n = lo; n <= hi; ++n) t.ref(n) = form.lambda(n) * vm.at(n);
  return t;
}

ArithTable dirichlet_convolve(const ArithTable& g, const ArithTable& h) {
  if (g.lo != 1 || h.lo != 1) throw parameter_error("convolution tables must start at 1");
  i64 n = std::min(g.hi, h.hi);
  ArithTable out = make_table(1, n, g.label + "*" + h.label);
  for (i64 d = 1; d <= n; ++d) {
    double gd = g.at(d);
    if (gd == 0.0) continue;
    for (i64 m = d; m <= n; m += d) out.ref(m) += gd * h.at(m / d);
  }
  return out;
}

ConvolutionReport convolution_check(const ArithTable& lhs, const ArithTable& g,
                                    const ArithTable& h, double tol) {
  if (lhs.lo != 1 || g.lo != 1 || h.lo != 1)
    throw parameter_error("convolution tables must start at 1");
  i64 n = std::min({lhs.hi, g.hi, h.hi});
  ConvolutionReport rep;
  rep.tol = tol;
  for (i64 m = 1; m <= n; ++m) {
    // brute force over divisors
    double acc = 0.0;
    for (i64 d = 1; d * d <= m; ++d) {
      if (m % d != 0) continue;
      acc += g.at(d) * h.at(m / d);
      if (d != m / d) acc += g.at(m / d) * h.at(d);
    }
    double err = std::abs(lhs.at(m) - acc);
    if (err > rep.max_abs_error) {
      rep.max_abs_error = err;
      rep.argmax = m;
    }
  }
  rep.pass = rep.max_abs_error <= tol;
  return rep;
}

HeathBrownReport heath_brown_identity_check(const CuspForm& form, int L, i64 z, i64 N) {
  if (L < 1 || L > 4) throw parameter_error("L must be in [1, 4]");
  double bound = 2.0 * std::pow((double)z, (double)L);
  if ((double)N > bound) throw parameter_error("identity requires N <= 2 z^L");
  if (N > form.ncoeffs()) throw parameter_error("N exceeds coefficient table");

  ArithTable lam_log = lambda_log_table(form, 1, N);
  ArithTable lam = lambda_table(form, 1, N);
  ArithTable mu = mu_f_table(form, 1, N);
  ArithTable mu_z = make_table(1, N, "mu_f<=z");
  for (i64 n = 1; n <= std::min(z, N); ++n) mu_z.ref(n) = mu.at(n);
  ArithTable target = lambda_f_table(form, 1, N);

  std::vector<double> total((std::size_t)N + 1, 0.0);
  double binom = 1.0;
  for (int ell = 1; ell <= L; ++ell) {
    binom = binom * (double)(L - ell + 1) / (double)ell;  // C(L, ell)
    // (lambda log) * lambda^{*(ell-1)} * (mu_f 1_{<=z})^{*ell}
    ArithTable term = lam_log;
    for (int j = 1; j < ell; ++j) term = dirichlet_convolve(term, lam);
    for (int j = 0; j < ell; ++j) term = dirichlet_convolve(term, mu_z);
    double sign = (ell % 2 == 1) ? 1.0 : -1.0;
    for (i64 n = 1; n <= N; ++n) total[(std::size_t)n] += sign * binom * term.at(n);
  }

  HeathBrownReport rep;
  rep.terms = L;
  for (i64 n = 1; n <= N; ++n) {
    double dev = std::abs(total[(std::size_t)n] - target.at(n));
    if (dev > rep.max_abs_deviation) {
      rep.max_abs_deviation = dev;
      rep.argmax = n;
    }
  }
  return rep;
}

SingularSeriesValue singular_series(i64 h, i64 pmax) {
  if (h == 0) throw parameter_error("shift h must be nonzero");
  if (pmax < 3) throw parameter_error("pmax must be >= 3");
  SingularSeriesValue out;
  if (h % 2 != 0) return out;  // odd shift: zero, no tail
  double prod = 2.0;
  for (i64 p : primes_upto(pmax)) {
    if (p == 2) continue;
    double pm1 = (double)(p - 1);
    prod *= 1.0 - 1.0 / (pm1 * pm1);
  }
  i64 hh = h < 0 ? -h : h;
  while (hh % 2 == 0) hh /= 2;
  for (i64 p = 3; p * p <= hh; p += 2) {
    if (hh % p != 0) continue;
    while (hh % p == 0) hh /= p;
    prod *= (double)(p - 1) / (double)(p - 2);
  }
  if (hh > 1) prod *= (double)(hh - 1) / (double)(hh - 2);
  out.value = prod;
  out.tail_bound = 2.0 / (double)pmax;  // sum_{p > pmax} 1/(p-1)^2 < 2/pmax
  return out;
}

ArithTable sieve_divisor(int m, i64 lo, i64 hi) {
  if (m < 2 || m > 10) throw parameter_error("divisor order m must be in [2, 10]");
  if (lo < 1 || hi < lo || hi > kSieveLimit)
    throw parameter_error("divisor range must satisfy 1 <= lo <= hi <= 1e8");
  if (hi - lo + 1 > kSegmentBudget) throw resource_error("segment too large");
  ArithTable t = make_table(lo, hi, "d_" + std::to_string(m));

  i64 root = (i64)std::sqrt((double)hi) + 1;
  std::vector<i64> primes = primes_upto(root);
  std::vector<i64> rem((std::size_t)(hi - lo + 1));
  std::vector<double> val((std::size_t)(hi - lo + 1), 1.0);
  for (i64 n = lo; n <= hi; ++n) rem[(std::size_t)(n - lo)] = n;
  for (i64 p : primes) {
    i64 start = ((lo + p - 1) / p) * p;
    for (i64 q = start; q <= hi; q += p) {
      i64& r = rem[(std::size_t)(q - lo)];
      unsigned __int128 binom = 1;
      i64 e = 0;
      while (r % p == 0) {
        r /= p;
        ++e;
      }
      // d_m(p^e) = C(e + m - 1, m - 1)
      for (i64 j = 1; j <= e; ++j) binom = binom * (unsigned __int128)(m - 1 + j) / (unsigned __int128)j;
      val[(std::size_t)(q - lo)] *= (double)(u64)(binom & 0xffffffffffffffffULL) +
                                    4294967296.0 * 4294967296.0 * (double)(u64)(binom >> 64);
    }
  }
  for (i64 n = lo; n <= hi; ++n) {
    std::size_t i = (std::size_t)(n - lo);
    if (rem[i] > 1) val[i] *= (double)m;  // one leftover prime, exponent 1
    t.ref(n) = val[i];
  }
  return t;
}

ArithTable sieve_mobius(i64 hi) {
  if (hi < 1 || hi > kSieveLimit) throw parameter_error("mobius range must be in [1, 1e8]");
  if (hi > kSegmentBudget) throw resource_error("segment too large");
  ArithTable t = make_table(1, hi, "mobius");
  std::vector<std::int32_t> spf((std::size_t)hi + 1, 0);
  for (i64 p = 2; p <= hi; ++p) {
    if (spf[(std::size_t)p] != 0) continue;
    for (i64 q = p; q <= hi; q += p)
      if (spf[(std::size_t)q] == 0) spf[(std::size_t)q] = (std::int32_t)p;
  }
  t.ref(1) = 1.0;
  for (i64 n = 2; n <= hi; ++n) {
    i64 p = spf[(std::size_t)n];
    i64 m = n / p;
    t.ref(n) = (m % p == 0) ? 0.0 : -t.ref(m);
  }
  return t;
}

}  // namespace cuspcorr
