#include "cuspcorr/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace cuspcorr {

namespace {
constexpr long double kTwoPi = 6.283185307179586476925286766559L;
}

cplx unit_phase(double x) {
  long double frac = x - std::floor((long double)x);
  long double ang = kTwoPi * frac;
  return {(double)std::cos(ang), (double)std::sin(ang)};
}

cplx unit_phase_scaled(i64 n, double alpha) {
  // n*alpha can reach ~1e7; reduce in long double so the phase keeps
  // ~1e-12 absolute accuracy.
  long double prod = (long double)n * (long double)alpha;
  long double frac = prod - std::floor(prod);
  long double ang = kTwoPi * frac;
  return {(double)std::cos(ang), (double)std::sin(ang)};
}

void parallel_for(i64 n, int threads, const std::function<void(i64)>& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n < 256) {
    for (i64 i = 0; i < n; ++i) fn(i);
    return;
  }
  // Block boundaries depend only on n, never on the thread count.
  const i64 block = 256;
  const i64 nblocks = (n + block - 1) / block;
  std::atomic<i64> next{0};
  auto worker = [&] {
    for (;;) {
      i64 b = next.fetch_add(1);
      if (b >= nblocks) return;
      i64 lo = b * block, hi = std::min(n, lo + block);
      for (i64 i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  int nt = std::min<int>(threads, (int)nblocks);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

namespace {
u64 splitmix64(u64& x) {
  u64 z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
u64 rotl(u64 x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256::Xoshiro256(u64 seed) {
  u64 x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

u64 Xoshiro256::next() {
  u64 result = rotl(s_[1] * 5, 7) * 9;
  u64 t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::next_unit() { return (next() >> 11) * 0x1.0p-53; }

i64 Xoshiro256::next_range(i64 lo, i64 hi) {
  u64 span = (u64)(hi - lo) + 1;
  return lo + (i64)(next() % span);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace cuspcorr
