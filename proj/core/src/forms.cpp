#include "cuspcorr/forms.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "cuspcorr/series.hpp"

namespace cuspcorr {

bool weight_supported(int k) {
  for (int w : kSupportedWeights)
    if (w == k) return true;
  return false;
}

namespace {

// a(n) / n^{(k-1)/2} through 256-bit floats, then one rounding to double.
double normalized_lambda(const mpz_class& a, i64 n, int k) {
  if (n == 1) return mpz_get_d(a.get_mpz_t());
  mpz_class npow;
  mpz_ui_pow_ui(npow.get_mpz_t(), (unsigned long)n, (unsigned long)(k - 1));
  mpf_t num, den;
  mpf_init2(num, 256);
  mpf_init2(den, 256);
  mpf_set_z(num, a.get_mpz_t());
  mpf_set_z(den, npow.get_mpz_t());
  mpf_sqrt(den, den);
  mpf_div(num, num, den);
  double out = mpf_get_d(num);
  mpf_clear(num);
  mpf_clear(den);
  return out;
}

ZSeries delta_coefficients(std::size_t n) {
  // Coefficient i holds tau(i+1): the q-shift of eta(q)^24.
  ZSeries p = eta_series(n);
  ZSeries p2 = series_sqr(p, n);
  ZSeries p4 = series_sqr(p2, n);
  ZSeries p8 = series_sqr(p4, n);
  ZSeries p16 = series_sqr(p8, n);
  return series_mul(p16, p8, n);
}

}  // namespace

CuspForm::CuspForm(int weight, std::vector<mpz_class> a)
    : weight_(weight), a_(std::move(a)) {
  if (a_.empty() || a_[0] != 1)
    throw parameter_error("cusp form must be normalized with a(1) = 1");
  lambda_.resize(a_.size());
  for (i64 n = 1; n <= (i64)a_.size(); ++n)
    lambda_[n - 1] = normalized_lambda(a_[n - 1], n, weight_);
}

const mpz_class& CuspForm::a(i64 n) const {
  if (n < 1 || n > ncoeffs())
    throw parameter_error("coefficient index out of table");
  return a_[n - 1];
}

double CuspForm::lambda(i64 n) const {
  if (n < 1 || n > ncoeffs())
    throw parameter_error("coefficient index out of table");
  return lambda_[n - 1];
}

CuspForm build_delta(i64 ncoeffs) {
  if (ncoeffs < 1 || ncoeffs > 10'000'000)
    throw parameter_error("ncoeffs must be in [1, 1e7]");
  ZSeries tau = delta_coefficients((std::size_t)ncoeffs);
  return CuspForm(12, std::move(tau));
}

CuspForm build_form(int weight, i64 ncoeffs) {
  if (!weight_supported(weight))
    throw unsupported_weight_error("weight must be one of {12,16,18,20,22,26}");
  if (ncoeffs < 1 || ncoeffs > 10'000'000)
    throw parameter_error("ncoeffs must be in [1, 1e7]");
  std::size_t n = (std::size_t)ncoeffs;
  if (weight == 12) return build_delta(ncoeffs);

  ZSeries delta = delta_coefficients(n);
  ZSeries eis;
  switch (weight) {
    case 16:
      eis = eisenstein4(n);
      break;
    case 18:
      eis = eisenstein6(n);
      break;
    case 20:
      eis = series_sqr(eisenstein4(n), n);  // E_8
      break;
    case 22:
      eis = series_mul(eisenstein4(n), eisenstein6(n), n);  // E_10
      break;
    case 26:
      eis = series_mul(series_sqr(eisenstein4(n), n), eisenstein6(n), n);  // E_14
      break;
  }
  return CuspForm(weight, series_mul(delta, eis, n));
}

double lambda_at(const CuspForm& form, i64 n) { return form.lambda(n); }

i64 hecke_violations(const CuspForm& form, i64 limit) {
  limit = std::min<i64>(limit, form.ncoeffs());
  const int k = form.weight();
  i64 bad = 0;
  mpz_class lhs, rhs, dpow, term;
  for (i64 m = 1; m * m <= limit; ++m) {
    for (i64 n = m; m * n <= limit; ++n) {
      i64 g = std::gcd(m, n);
      lhs = form.a(m) * form.a(n);
      rhs = 0;
      for (i64 d = 1; d <= g; ++d) {
        if (g % d != 0) continue;
        mpz_ui_pow_ui(dpow.get_mpz_t(), (unsigned long)d, (unsigned long)(k - 1));
        term = dpow * form.a(m * n / (d * d));
        rhs += term;
      }
      if (lhs != rhs) ++bad;
    }
  }
  return bad;
}

i64 deligne_violation(const CuspForm& form, i64 nmax) {
  nmax = std::min<i64>(nmax, form.ncoeffs());
  std::vector<std::uint32_t> d2((std::size_t)nmax + 1, 0);
  for (i64 d = 1; d <= nmax; ++d)
    for (i64 n = d; n <= nmax; n += d) d2[n]++;
  mpz_class lhs, rhs;
  for (i64 n = 1; n <= nmax; ++n) {
    lhs = form.a(n) * form.a(n);
    mpz_ui_pow_ui(rhs.get_mpz_t(), (unsigned long)n, (unsigned long)(form.weight() - 1));
    rhs *= (unsigned long)d2[n];
    rhs *= (unsigned long)d2[n];
    if (lhs > rhs) return n;
  }
  return 0;
}

bool eisenstein_identity_ok(std::size_t trunc) {
  ZSeries e4 = eisenstein4(trunc);
  ZSeries e6 = eisenstein6(trunc);
  ZSeries e4cubed = series_mul(series_sqr(e4, trunc), e4, trunc);
  ZSeries e6sq = series_sqr(e6, trunc);
  ZSeries delta = delta_coefficients(trunc);
  if (e4cubed[0] - e6sq[0] != 0) return false;
  for (std::size_t i = 1; i < trunc; ++i) {
    mpz_class rhs = 1728 * delta[i - 1];  // Delta has a q-shift
    if (e4cubed[i] - e6sq[i] != rhs) return false;
  }
  return true;
}

namespace {

void put_u16(std::ofstream& os, std::uint16_t v) {
  unsigned char b[2] = {(unsigned char)(v & 0xff), (unsigned char)(v >> 8)};
  os.write((const char*)b, 2);
}
void put_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
  os.write((const char*)b, 4);
}
void put_u64(std::ofstream& os, u64 v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
  os.write((const char*)b, 8);
}

struct Reader {
  std::ifstream is;
  u64 offset = 0;
  explicit Reader(const std::string& path) : is(path, std::ios::binary) {
    if (!is) throw integrity_error("cannot open cache file: " + path);
  }
  void read(void* dst, std::size_t n, const char* what) {
    is.read((char*)dst, (std::streamsize)n);
    if ((std::size_t)is.gcount() != n)
      throw integrity_error("truncated cache (" + std::string(what) +
                            ") at byte offset " + std::to_string(offset));
    offset += n;
  }
  std::uint16_t u16(const char* what) {
    unsigned char b[2];
    read(b, 2, what);
    return (std::uint16_t)(b[0] | (b[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    read(b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= (std::uint32_t)b[i] << (8 * i);
    return v;
  }
  u64 u64v(const char* what) {
    unsigned char b[8];
    read(b, 8, what);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= (u64)b[i] << (8 * i);
    return v;
  }
};

constexpr std::uint16_t kCacheVersion = 1;

}  // namespace

void write_cache(const CuspForm& form, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw resource_error("cannot open cache for writing: " + path);
  os.write("CUSP", 4);
  put_u16(os, kCacheVersion);
  put_u16(os, (std::uint16_t)form.weight());
  put_u64(os, (u64)form.ncoeffs());
  std::vector<unsigned char> mag;
  for (i64 n = 1; n <= form.ncoeffs(); ++n) {
    const mpz_class& c = form.a(n);
    int sgn = mpz_sgn(c.get_mpz_t());
    unsigned char sign_byte = (sgn < 0) ? 1 : 0;
    os.write((const char*)&sign_byte, 1);
    if (sgn == 0) {
      put_u32(os, 0);
      continue;
    }
    std::size_t bytes = (mpz_sizeinbase(c.get_mpz_t(), 2) + 7) / 8;
    mag.resize(bytes);
    std::size_t count = 0;
    mpz_export(mag.data(), &count, -1, 1, 0, 0, c.get_mpz_t());
    put_u32(os, (std::uint32_t)count);
    os.write((const char*)mag.data(), (std::streamsize)count);
  }
  if (!os) throw resource_error("write failure on cache: " + path);
}

CacheInfo cache_info(const std::string& path) {
  Reader r(path);
  char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, "CUSP", 4) != 0)
    throw integrity_error("bad magic bytes at byte offset 0");
  CacheInfo info;
  info.version = r.u16("version");
  if (info.version != kCacheVersion)
    throw integrity_error("unsupported cache version " + std::to_string(info.version));
  info.weight = r.u16("weight");
  info.ncoeffs = r.u64v("ncoeffs");
  return info;
}

CuspForm read_cache(const std::string& path) {
  Reader r(path);
  char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, "CUSP", 4) != 0)
    throw integrity_error("bad magic bytes at byte offset 0");
  int version = r.u16("version");
  if (version != kCacheVersion)
    throw integrity_error("unsupported cache version " + std::to_string(version));
  int weight = r.u16("weight");
  u64 n = r.u64v("ncoeffs");
  std::vector<mpz_class> a((std::size_t)n);
  std::vector<unsigned char> mag;
  for (u64 i = 0; i < n; ++i) {
    unsigned char sign_byte;
    r.read(&sign_byte, 1, "sign");
    std::uint32_t len = r.u32("length");
    if (len == 0) {
      a[i] = 0;
      if (sign_byte != 0)
        throw integrity_error("negative zero record at byte offset " +
                              std::to_string(r.offset - 5));
      continue;
    }
    mag.resize(len);
    r.read(mag.data(), len, "magnitude");
    mpz_import(a[i].get_mpz_t(), len, -1, 1, 0, 0, mag.data());
    if (sign_byte) a[i] = -a[i];
  }
  return CuspForm(weight, std::move(a));
}

i64 cache_verify_sample(const CuspForm& form, u64 seed) {
  const i64 n = form.ncoeffs();
  const int k = form.weight();
  i64 samples = std::max<i64>(1, n / 100);
  Xoshiro256 rng(seed);
  i64 mismatches = 0;
  mpz_class expect, ppow, pk;
  for (i64 s = 0; s < samples; ++s) {
    i64 m = rng.next_range(1, n);
    // Rebuild a(m) multiplicatively from prime entries.
    expect = 1;
    i64 rest = m;
    for (i64 p = 2; p * p <= rest; ++p) {
      if (rest % p != 0) continue;
      int e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      // a(p^e) from a(p) by a(p^{j+1}) = a(p) a(p^j) - p^{k-1} a(p^{j-1}).
      mpz_ui_pow_ui(pk.get_mpz_t(), (unsigned long)p, (unsigned long)(k - 1));
      mpz_class prev = 1, cur = form.a(p);
      for (int j = 1; j < e; ++j) {
        mpz_class nxt = form.a(p) * cur - pk * prev;
        prev = cur;
        cur = nxt;
      }
      expect *= cur;
    }
    if (rest > 1) expect *= form.a(rest);
    if (expect != form.a(m)) ++mismatches;
  }
  return mismatches;
}

}  // namespace cuspcorr
