#include "cuspcorr/series.hpp"

#include <algorithm>
#include <cstring>

namespace cuspcorr {

namespace {

std::size_t max_coeff_bits(const ZSeries& a) {
  std::size_t b = 1;
  for (const auto& c : a) b = std::max(b, mpz_sizeinbase(c.get_mpz_t(), 2));
  return b;
}

// Packs nonnegative coefficients into consecutive `slot_words` 64-bit words.
mpz_class pack(const ZSeries& a, bool negative_part, std::size_t slot_words) {
  std::vector<u64> buf(a.size() * slot_words, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const mpz_class& c = a[i];
    int sgn = mpz_sgn(c.get_mpz_t());
    if (negative_part ? sgn >= 0 : sgn <= 0) continue;
    mpz_t abs_c;
    mpz_init(abs_c);
    mpz_abs(abs_c, c.get_mpz_t());
    std::size_t count = 0;
    mpz_export(buf.data() + i * slot_words, &count, -1, sizeof(u64), 0, 0, abs_c);
    mpz_clear(abs_c);
  }
  mpz_class z;
  mpz_import(z.get_mpz_t(), buf.size(), -1, sizeof(u64), 0, 0, buf.data());
  return z;
}

// Splits a product integer back into slot-sized nonnegative coefficients and
// adds them (scaled by sign) onto out.
void unpack_add(ZSeries& out, const mpz_class& prod, std::size_t slot_words, int sign) {
  if (mpz_sgn(prod.get_mpz_t()) == 0) return;
  std::size_t words = (mpz_sizeinbase(prod.get_mpz_t(), 2) + 63) / 64;
  std::vector<u64> buf(words + slot_words, 0);
  std::size_t count = 0;
  mpz_export(buf.data(), &count, -1, sizeof(u64), 0, 0, prod.get_mpz_t());
  mpz_t slot;
  mpz_init(slot);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t off = i * slot_words;
    if (off >= count) break;
    mpz_import(slot, slot_words, -1, sizeof(u64), 0, 0, buf.data() + off);
    if (mpz_sgn(slot) == 0) continue;
    if (sign > 0)
      mpz_add(out[i].get_mpz_t(), out[i].get_mpz_t(), slot);
    else
      mpz_sub(out[i].get_mpz_t(), out[i].get_mpz_t(), slot);
  }
  mpz_clear(slot);
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < n) ++b;
  return b;
}

}  // namespace

ZSeries series_mul(const ZSeries& a, const ZSeries& b, std::size_t trunc) {
  if (a.empty() || b.empty() || trunc == 0) return ZSeries(trunc, mpz_class(0));
  std::size_t la = std::min(a.size(), trunc), lb = std::min(b.size(), trunc);
  // Slot must hold sum of min(la,lb) products of coefficient magnitudes.
  std::size_t bits = max_coeff_bits(a) + max_coeff_bits(b) + ceil_log2(std::min(la, lb)) + 2;
  std::size_t slot_words = (bits + 63) / 64;

  ZSeries av(a.begin(), a.begin() + la), bv(b.begin(), b.begin() + lb);
  mpz_class ap = pack(av, false, slot_words), an = pack(av, true, slot_words);
  mpz_class bp = pack(bv, false, slot_words), bn = pack(bv, true, slot_words);

  ZSeries out(trunc, mpz_class(0));
  unpack_add(out, ap * bp, slot_words, +1);
  unpack_add(out, an * bn, slot_words, +1);
  unpack_add(out, ap * bn, slot_words, -1);
  unpack_add(out, an * bp, slot_words, -1);
  return out;
}

ZSeries series_sqr(const ZSeries& a, std::size_t trunc) {
  if (a.empty() || trunc == 0) return ZSeries(trunc, mpz_class(0));
  std::size_t la = std::min(a.size(), trunc);
  std::size_t bits = 2 * max_coeff_bits(a) + ceil_log2(la) + 2;
  std::size_t slot_words = (bits + 63) / 64;

  ZSeries av(a.begin(), a.begin() + la);
  mpz_class ap = pack(av, false, slot_words), an = pack(av, true, slot_words);

  ZSeries out(trunc, mpz_class(0));
  unpack_add(out, ap * ap, slot_words, +1);
  unpack_add(out, an * an, slot_words, +1);
  mpz_class cross = ap * an;
  cross <<= 1;
  unpack_add(out, cross, slot_words, -1);
  return out;
}

ZSeries eta_series(std::size_t trunc) {
  ZSeries p(trunc, mpz_class(0));
  if (trunc == 0) return p;
  p[0] = 1;
  // Generalized pentagonal numbers k(3k-1)/2, k = 1,-1,2,-2,... with sign (-1)^k.
  for (i64 k = 1;; ++k) {
    i64 g1 = k * (3 * k - 1) / 2;
    i64 g2 = k * (3 * k + 1) / 2;
    if (g1 >= (i64)trunc && g2 >= (i64)trunc) break;
    int sign = (k % 2 == 0) ? +1 : -1;
    if (g1 < (i64)trunc) p[g1] = sign;
    if (g2 < (i64)trunc) p[g2] = sign;
  }
  return p;
}

namespace {
// sum over d | n of d^e, accumulated by sieving multiples.
ZSeries sigma_series(std::size_t trunc, int e, long scale, long c0) {
  ZSeries s(trunc, mpz_class(0));
  if (trunc == 0) return s;
  s[0] = c0;
  mpz_class dpow;
  for (std::size_t d = 1; d < trunc; ++d) {
    mpz_ui_pow_ui(dpow.get_mpz_t(), d, e);
    dpow *= scale;
    for (std::size_t n = d; n < trunc; n += d) s[n] += dpow;
  }
  return s;
}
}  // namespace

ZSeries eisenstein4(std::size_t trunc) { return sigma_series(trunc, 3, 240, 1); }

ZSeries eisenstein6(std::size_t trunc) { return sigma_series(trunc, 5, -504, 1); }

}  // namespace cuspcorr
