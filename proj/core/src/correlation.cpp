#include "cuspcorr/correlation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cuspcorr {

double CorrelationResult::c(i64 h) const {
  i64 ah = h < 0 ? -h : h;
  if (ah < 1 || ah > H) throw parameter_error("shift out of range");
  return per_shift[(std::size_t)(ah - 1)];
}

namespace {

i64 table_X(const ArithTable& coeffs) {
  i64 X = coeffs.lo - 1;
  if (coeffs.hi != 2 * X) throw parameter_error("coeffs must cover (X, 2X]");
  return X;
}

double vf_from_shifts(const std::vector<double>& c) {
  KahanSum acc;
  for (double v : c) acc.add(2.0 * v * v);
  return acc.value();
}

}  // namespace

CorrelationResult autocorr_direct(const ArithTable& coeffs, i64 H, int threads) {
  i64 X = table_X(coeffs);
  if (H < 1 || H >= X) throw parameter_error("H must be in [1, X-1]");
  CorrelationResult out;
  out.X = X;
  out.H = H;
  out.method = CorrMethod::direct;
  out.per_shift.assign((std::size_t)H, 0.0);
  const double* w = coeffs.values.data();
  const i64 len = coeffs.size();
  parallel_for(H, threads, [&](i64 i) {
    i64 h = i + 1;
    KahanSum acc;
    for (i64 j = h; j < len; ++j) acc.add(w[j] * w[j - h]);
    out.per_shift[(std::size_t)i] = acc.value();
  });
  out.vf = vf_from_shifts(out.per_shift);
  return out;
}

namespace {

// Linear autocorrelation of the real table by one complex FFT round trip.
std::vector<double> fft_autocorr_all(const ArithTable& coeffs) {
  const i64 X = table_X(coeffs);
  const i64 len = coeffs.size();
  std::size_t L = 1;
  while ((i64)L < 2 * (X + 1)) {
    L <<= 1;
    if (L > (std::size_t{1} << 28)) throw resource_error("transform length overflow");
  }
  fftw_complex* buf = fftw_alloc_complex(L);
  if (!buf) throw resource_error("fftw allocation failed");
  for (std::size_t i = 0; i < L; ++i) {
    buf[i][0] = (i < (std::size_t)len) ? coeffs.values[i] : 0.0;
    buf[i][1] = 0.0;
  }
  fftw_plan fwd = fftw_plan_dft_1d((int)L, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  for (std::size_t i = 0; i < L; ++i) {
    double re = buf[i][0], im = buf[i][1];
    buf[i][0] = re * re + im * im;
    buf[i][1] = 0.0;
  }
  fftw_plan bwd = fftw_plan_dft_1d((int)L, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);
  std::vector<double> c((std::size_t)len, 0.0);  // c[h], h = 0..len-1
  for (i64 h = 0; h < len; ++h) c[(std::size_t)h] = buf[h][0] / (double)L;
  fftw_free(buf);
  return c;
}

}  // namespace

CorrelationResult autocorr_fft(const ArithTable& coeffs, i64 H) {
  i64 X = table_X(coeffs);
  if (H < 1 || H >= X) throw parameter_error("H must be in [1, X-1]");
  std::vector<double> all = fft_autocorr_all(coeffs);
  CorrelationResult out;
  out.X = X;
  out.H = H;
  out.method = CorrMethod::fft;
  out.per_shift.assign(all.begin() + 1, all.begin() + 1 + H);
  out.vf = vf_from_shifts(out.per_shift);
  return out;
}

double smoothing_kernel(double x) {
  constexpr double kQuarterPiSq = M_PI * M_PI / 4.0;
  if (x == 0.0) return kQuarterPiSq;
  double t = M_PI * x / 2.0;
  double s = std::sin(t) / t;
  return kQuarterPiSq * s * s;
}

double vf_smoothed(const ArithTable& coeffs, i64 H) {
  i64 X = table_X(coeffs);
  if (H < 1 || H >= X) throw parameter_error("H must be in [1, X-1]");
  std::vector<double> all = fft_autocorr_all(coeffs);
  KahanSum acc;
  double c0 = all[0];
  acc.add(c0 * c0 * smoothing_kernel(0.0));
  for (i64 h = 1; h < (i64)all.size(); ++h) {
    double ch = all[(std::size_t)h];
    acc.add(2.0 * ch * ch * smoothing_kernel((double)h / (double)H));
  }
  double smoothed = acc.value();
  // Kernel >= 1 on [-1,1] and >= 0 elsewhere, so this dominates the raw sum.
  KahanSum raw;
  for (i64 h = 1; h <= H; ++h) {
    double ch = all[(std::size_t)h];
    raw.add(2.0 * ch * ch);
  }
  if (smoothed < raw.value())
    throw consistency_error("smoothed majorant fell below the raw correlation sum");
  return smoothed;
}

CircleCheckReport circle_integral_check(const ArithTable& coeffs, i64 H) {
  i64 X = table_X(coeffs);
  if (X > 10'000) throw parameter_error("X must be <= 1e4 for the dense grid");
  if (H < 1 || H >= X) throw parameter_error("H must be in [1, X-1]");

  const i64 G = 4 * X + 2;
  // Exact G-th roots of unity indexed by (n * j) mod G.
  std::vector<cplx> roots((std::size_t)G);
  for (i64 r = 0; r < G; ++r) {
    double ang = 2.0 * M_PI * (double)r / (double)G;
    roots[(std::size_t)r] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<double> energy((std::size_t)G);
  for (i64 j = 0; j < G; ++j) {
    KahanSumC s;
    for (i64 n = coeffs.lo; n <= coeffs.hi; ++n) {
      double c = coeffs.at(n);
      if (c == 0.0) continue;
      s.add(c * roots[(std::size_t)((n % G) * j % G)]);
    }
    energy[(std::size_t)j] = std::norm(s.value());
  }

  CorrelationResult direct = autocorr_direct(coeffs, H);
  CircleCheckReport rep;
  KahanSum l2;
  for (i64 n = coeffs.lo; n <= coeffs.hi; ++n) l2.add(coeffs.at(n) * coeffs.at(n));
  rep.l2_norm_sq = l2.value();

  for (i64 h = 0; h <= H; ++h) {
    KahanSumC acc;
    for (i64 j = 0; j < G; ++j) {
      i64 idx = (i64)(((__int128)h * j) % G);
      acc.add(energy[(std::size_t)j] * std::conj(roots[(std::size_t)idx]));
    }
    cplx integral = acc.value() / (double)G;
    if (h == 0) {
      rep.h0_integral = integral.real();
      continue;
    }
    double expect = direct.c(h);
    // relative for large entries, absolute once |c(h)| drops below 1
    double dev = std::abs(integral - cplx{expect, 0.0}) / std::max(std::abs(expect), 1.0);
    if (dev > rep.max_rel_deviation) {
      rep.max_rel_deviation = dev;
      rep.argmax = h;
    }
  }
  if (rep.max_rel_deviation > 1e-8)
    throw consistency_error("circle-method identity deviation exceeds 1e-8");
  return rep;
}

double arc_energy(const ArithTable& coeffs, const ArcDissection& arcs, double alpha,
                  double window) {
  if (window < 0.0) throw parameter_error("window must be >= 0");
  i64 X = table_X(coeffs);
  double lo = alpha - window, hi = alpha + window;
  // Intersect the merged arc union with [lo, hi].
  std::vector<std::pair<double, double>> pieces;
  for (const auto& [s, e] : arcs.merged) {
    double a = std::max(s, lo), b = std::min(e, hi);
    if (b > a) pieces.emplace_back(a, b);
  }
  if (pieces.empty()) return 0.0;

  double total_len = 0.0;
  for (const auto& [a, b] : pieces) total_len += b - a;
  if (total_len >= 1.0 - 1e-12) {
    // Full circle: Parseval, evaluated exactly.
    KahanSum acc;
    for (i64 n = coeffs.lo; n <= coeffs.hi; ++n) acc.add(coeffs.at(n) * coeffs.at(n));
    return acc.value();
  }

  auto piece_energy = [&](double a, double b) {
    i64 panels = std::max<i64>(16, (i64)std::ceil((b - a) * 8.0 * (double)X));
    if (panels % 2) ++panels;
    auto f = [&](double beta) { return std::norm(exp_sum(coeffs, beta)); };
    double prev = 0.0;
    for (int d = 0; d <= 6; ++d) {
      double h = (b - a) / (double)panels;
      KahanSum acc;
      acc.add(f(a));
      acc.add(f(b));
      for (i64 i = 1; i < panels; ++i)
        acc.add(((i % 2) ? 4.0 : 2.0) * f(a + h * (double)i));
      double cur = acc.value() * h / 3.0;
      if (d > 0 && std::abs(cur - prev) <= 1e-3 * std::abs(cur) + 1e-300) return cur;
      prev = cur;
      panels *= 2;
    }
    throw numeric_instability_error("arc energy quadrature did not settle");
  };
  KahanSum total;
  for (const auto& [a, b] : pieces) total.add(piece_energy(a, b));
  return total.value();
}

std::vector<HardyLittlewoodRow> hardy_littlewood_compare(i64 X, i64 H, i64 pmax) {
  if (X < 4 || X > 10'000'000) throw parameter_error("X must be in [4, 1e7]");
  if (H < 1) throw parameter_error("H must be >= 1");
  ArithTable vm = sieve_vonmangoldt(X + 1, 2 * X + H);
  // Prime powers are sparse; collect support once.
  std::vector<i64> support;
  for (i64 n = X + 1; n <= 2 * X; ++n)
    if (vm.at(n) != 0.0) support.push_back(n);

  std::vector<HardyLittlewoodRow> rows;
  rows.reserve((std::size_t)H);
  double xpow = std::pow((double)X, 0.6);
  for (i64 h = 1; h <= H; ++h) {
    HardyLittlewoodRow row;
    row.h = h;
    KahanSum acc;
    for (i64 n : support) acc.add(vm.at(n) * vm.at_or_zero(n + h));
    row.correlation = acc.value();
    row.singular_series = (h % 2 == 0) ? singular_series(h, pmax).value : 0.0;
    row.error = row.correlation - row.singular_series * (double)X;
    row.normalized = row.error / xpow;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cuspcorr
