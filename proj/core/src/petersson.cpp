#include "cuspcorr/petersson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/correlation.hpp"

namespace cuspcorr {

std::vector<i64> inverse_table(i64 c) {
  std::vector<i64> inv((std::size_t)c, 0);
  if (c == 1) return inv;
  for (i64 x = 1; x < c; ++x) {
    if (inv[(std::size_t)x] != 0) continue;
    // extended Euclid; works for any modulus
    i64 old_r = x, r = c, old_s = 1, s = 0;
    while (r != 0) {
      i64 qt = old_r / r;
      i64 tmp = old_r - qt * r;
      old_r = r;
      r = tmp;
      tmp = old_s - qt * s;
      old_s = s;
      s = tmp;
    }
    if (old_r != 1) continue;  // not a unit
    i64 ix = ((old_s % c) + c) % c;
    inv[(std::size_t)x] = ix;
    inv[(std::size_t)ix] = x;
  }
  return inv;
}

namespace {

double kloosterman_with_table(i64 m, i64 n, i64 c, const std::vector<i64>& inv) {
  if (c == 1) return 1.0;
  KahanSum acc;
  double step = 2.0 * M_PI / (double)c;
  i64 mr = ((m % c) + c) % c, nr = ((n % c) + c) % c;
  for (i64 x = 1; x < c; ++x) {
    if (inv[(std::size_t)x] == 0) continue;
    i64 r = (mr * x + nr * inv[(std::size_t)x]) % c;
    // x <-> -x pairs terms into conjugates; summing cosines is the exact
    // real symmetrization.
    acc.add(std::cos(step * (double)r));
  }
  return acc.value();
}

}  // namespace

double kloosterman(i64 m, i64 n, i64 c) {
  if (c < 1) throw parameter_error("modulus c must be >= 1");
  if (c == 1) return 1.0;
  return kloosterman_with_table(m, n, c, inverse_table(c));
}

namespace {

double bessel_series(int nu, double x) {
  double half = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= nu; ++j) term *= half / (double)j;  // (x/2)^nu / nu!
  double sum = term;
  double q = half * half;
  for (int j = 1; j < 256; ++j) {
    term *= -q / ((double)j * (double)(nu + j));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double bessel_miller(int nu, double x) {
  int big = std::max(nu, (int)x);
  int start = big + 16 + (int)std::sqrt(40.0 * (double)big);
  if (start % 2) ++start;
  double fp1 = 0.0, f = 1e-30;
  double result = 0.0, norm = 0.0;
  for (int j = start; j >= 1; --j) {
    double fm1 = (2.0 * (double)j / x) * f - fp1;
    fp1 = f;
    f = fm1;
    if (j - 1 == nu) result = f;
    if ((j - 1) % 2 == 0) norm += (j - 1 == 0) ? f : 2.0 * f;
    if (std::abs(f) > 1e250) {
      f *= 1e-250;
      fp1 *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
  }
  return result / norm;
}

double bessel_hankel(int nu, double x) {
  double mu = 4.0 * (double)nu * (double)nu;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double denom = 8.0 * x;
  for (int j = 1; j < 64; ++j) {
    double odd = (double)(2 * j - 1);
    double next = term * (mu - odd * odd) / ((double)j * denom);
    if (std::abs(next) >= std::abs(term) && j > 2) break;  // asymptotic floor
    term = next;
    switch (j % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (std::abs(term) < 1e-18) break;
  }
  double chi = x - (0.5 * (double)nu + 0.25) * M_PI;
  return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(int nu, double x) {
  if (nu < 1) throw parameter_error("order must be >= 1");
  if (x < 0.0) throw parameter_error("argument must be >= 0");
  if (x == 0.0) return 0.0;
  if (x <= (double)nu + 2.0) return bessel_series(nu, x);
  double hankel_cut = 16.0 * (double)nu + 20.0;
  if (x < hankel_cut) return bessel_miller(nu, x);
  if (x > 5e4 && (double)nu > 60.0)
    throw numeric_instability_error("bessel accuracy not guaranteed at this (nu, x)");
  return bessel_hankel(nu, x);
}

double petersson_tail_bound(int k, i64 m, i64 n, i64 cmax) {
  // |J_{k-1}(y)| <= (y/2)^{k-1}/(k-1)! and |S(m,n;c)| <= c give
  // tail <= 2 pi (2 pi sqrt(mn))^{k-1}/(k-1)! * cmax^{2-k}/(k-2).
  double r = 2.0 * M_PI * std::sqrt((double)m * (double)n);
  double log_term = std::log(2.0 * M_PI) + (double)(k - 1) * std::log(r) -
                    std::lgamma((double)k) - std::log((double)(k - 2)) -
                    (double)(k - 2) * std::log((double)cmax);
  return std::exp(log_term);
}

i64 petersson_cmax_for(int k, i64 m, i64 n, double eps) {
  if (eps <= 0.0) throw parameter_error("eps must be positive");
  i64 lo = 1, hi = 1;
  while (petersson_tail_bound(k, m, n, hi) > eps) {
    hi *= 2;
    if (hi > (i64)2e7)
      throw truncation_error("no admissible truncation point for requested accuracy");
  }
  while (lo + 1 < hi) {
    i64 mid = lo + (hi - lo) / 2;
    if (petersson_tail_bound(k, m, n, mid) <= eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

void check_weight_range(int k) {
  if (k < 12 || k > 26 || k % 2 != 0)
    throw parameter_error("weight must be even and in [12, 26]");
}

}  // namespace

PeterssonValue petersson_delta(int k, i64 m, i64 n, i64 cmax) {
  check_weight_range(k);
  if (m < 1 || n < 1) throw parameter_error("m, n must be >= 1");
  if (cmax < 1) throw parameter_error("cmax must be >= 1");

  PeterssonValue out;
  out.k = k;
  out.m = m;
  out.n = n;
  out.truncation_c = cmax;

  double sign = (k % 4 == 0) ? 1.0 : -1.0;  // i^{-k} for even k
  double arg_base = 4.0 * M_PI * std::sqrt((double)m * (double)n);
  KahanSum acc;
  for (i64 c = 1; c <= cmax; ++c) {
    double s = kloosterman(m, n, c);
    if (s == 0.0) continue;
    acc.add(s / (double)c * bessel_j(k - 1, arg_base / (double)c));
  }
  out.value = (m == n ? 1.0 : 0.0) + 2.0 * M_PI * sign * acc.value();
  out.tail_bound = petersson_tail_bound(k, m, n, cmax);
  out.imag_residue = 0.0;  // real symmetrization is exact by construction
  if (out.tail_bound > 1e-8)
    throw truncation_error("petersson tail bound above 1e-8; raise cmax");
  return out;
}

std::vector<std::vector<PeterssonValue>> petersson_matrix(int k, i64 mmax, double eps) {
  check_weight_range(k);
  if (mmax < 1) throw parameter_error("mmax must be >= 1");
  i64 cmax = petersson_cmax_for(k, mmax, mmax, eps);
  double sign = (k % 4 == 0) ? 1.0 : -1.0;
  int nu = k - 1;

  std::vector<std::vector<KahanSum>> acc((std::size_t)mmax,
                                         std::vector<KahanSum>((std::size_t)mmax));
  // Modulus-outer loop so each inverse table is built once and shared.
  for (i64 c = 1; c <= cmax; ++c) {
    std::vector<i64> inv = c > 1 ? inverse_table(c) : std::vector<i64>{};
    for (i64 m = 1; m <= mmax; ++m)
      for (i64 n = m; n <= mmax; ++n) {
        double s = (c == 1) ? 1.0 : kloosterman_with_table(m, n, c, inv);
        if (s == 0.0) continue;
        double arg = 4.0 * M_PI * std::sqrt((double)m * (double)n) / (double)c;
        double term = s / (double)c * bessel_j(nu, arg);
        acc[(std::size_t)(m - 1)][(std::size_t)(n - 1)].add(term);
        if (n != m) acc[(std::size_t)(n - 1)][(std::size_t)(m - 1)].add(term);
      }
  }
  std::vector<std::vector<PeterssonValue>> out((std::size_t)mmax);
  for (i64 m = 1; m <= mmax; ++m) {
    out[(std::size_t)(m - 1)].resize((std::size_t)mmax);
    for (i64 n = 1; n <= mmax; ++n) {
      PeterssonValue v;
      v.k = k;
      v.m = m;
      v.n = n;
      v.truncation_c = cmax;
      v.value = (m == n ? 1.0 : 0.0) +
                2.0 * M_PI * sign *
                    acc[(std::size_t)(m - 1)][(std::size_t)(n - 1)].value();
      v.tail_bound = petersson_tail_bound(k, m, n, cmax);
      out[(std::size_t)(m - 1)][(std::size_t)(n - 1)] = v;
    }
  }
  return out;
}

double harmonic_weight(int k, i64 cmax) {
  if (!weight_supported(k))
    throw unsupported_weight_error("harmonic weight needs dim S_k = 1");
  double w = petersson_delta(k, 1, 1, cmax).value;
  if (w <= 0.0) throw consistency_error("harmonic weight must be positive");
  return w;
}

AveragedVfReport averaged_vf(const CuspForm& form, i64 X, i64 H, i64 cmax,
                             i64 sample_x, i64 sample_y, double sample_alpha) {
  if (!weight_supported(form.weight()))
    throw unsupported_weight_error("averaged correlation needs dim S_k = 1");
  if (2 * X > form.ncoeffs() || sample_x + sample_y > form.ncoeffs())
    throw parameter_error("window exceeds coefficient table");

  AveragedVfReport rep;
  rep.omega = harmonic_weight(form.weight(), cmax);

  if (H >= 1 && H < X) {
    ArithTable w = lambda_vonmangoldt_table(form, X + 1, 2 * X);
    rep.vf = autocorr_fft(w, H).vf;
    rep.weighted_vf = rep.omega * rep.vf;
    rep.normalized = rep.weighted_vf / ((double)H * (double)X * (double)X);
  }

  if (sample_y < 1) return rep;

  // Two routes for sum_f omega_f |sum_{x<n<=x+y} lambda Lambda e(n alpha)|^2;
  // with dim S_k = 1 the direct route is omega |S|^2 and the expansion route
  // is sum Lambda(n)^2 plus Kloosterman/Bessel error terms.
  ArithTable vm = sieve_vonmangoldt(sample_x + 1, sample_x + sample_y);
  std::vector<i64> support;
  for (i64 nn = vm.lo; nn <= vm.hi; ++nn)
    if (vm.at(nn) != 0.0) support.push_back(nn);

  KahanSumC s;
  KahanSum diag;
  for (i64 nn : support) {
    double c = form.lambda(nn) * vm.at(nn);
    s.add(c * unit_phase_scaled(nn, sample_alpha));
    diag.add(vm.at(nn) * vm.at(nn));
  }
  rep.direct = rep.omega * std::norm(s.value());
  rep.diagonal = diag.value();

  if (support.empty()) {
    rep.expansion = 0.0;
    rep.rel_gap = std::abs(rep.direct - rep.expansion) / (1.0 + std::abs(rep.direct));
    return rep;
  }

  // Neglected c-tail must stay below 1e-7 * (1 + direct) in total.
  double wsum = 0.0;
  for (i64 nn : support)
    for (i64 mm : support) wsum += vm.at(nn) * vm.at(mm);
  double per_pair_eps = 1e-7 * (1.0 + std::abs(rep.direct)) / std::max(wsum, 1.0);
  i64 top = support.back();
  i64 pair_cmax = petersson_cmax_for(form.weight(), top, top, per_pair_eps);

  double sign = (form.weight() % 4 == 0) ? 1.0 : -1.0;
  int nu = form.weight() - 1;
  std::size_t ns = support.size();
  std::vector<KahanSum> esum(ns * ns);
  for (i64 c = 1; c <= pair_cmax; ++c) {
    std::vector<i64> inv = c > 1 ? inverse_table(c) : std::vector<i64>{};
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = i; j < ns; ++j) {
        i64 nn = support[i], mm = support[j];
        double kl = (c == 1) ? 1.0 : kloosterman_with_table(nn, mm, c, inv);
        if (kl == 0.0) continue;
        double arg = 4.0 * M_PI * std::sqrt((double)nn * (double)mm) / (double)c;
        double term = kl / (double)c * bessel_j(nu, arg);
        esum[i * ns + j].add(term);
        if (j != i) esum[j * ns + i].add(term);
      }
  }
  KahanSumC expansion;
  expansion.add({rep.diagonal, 0.0});
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j) {
      i64 nn = support[i], mm = support[j];
      double e_term = 2.0 * M_PI * sign * esum[i * ns + j].value();
      double weight = vm.at(nn) * vm.at(mm);
      expansion.add(weight * e_term * unit_phase_scaled(nn - mm, sample_alpha));
    }
  rep.expansion = expansion.value().real();
  rep.rel_gap = std::abs(rep.direct - rep.expansion) / (1.0 + std::abs(rep.direct));
  if (rep.rel_gap > 1e-6)
    throw consistency_error("trace-formula expansion disagrees with direct route");
  return rep;
}

}  // namespace cuspcorr
