#pragma once

#include <vector>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/common.hpp"
#include "cuspcorr/expsum.hpp"

namespace cuspcorr {

enum class CorrMethod { direct, fft };

// Shift correlations c(h) = sum_{n-m=h} w(n) w(m) for the table w on (X, 2X],
// and V = sum_{1 <= |h| <= H} c(h)^2. Real input gives c(-h) = c(h), so only
// h >= 1 is stored and V = 2 sum_{h=1}^{H} c(h)^2.
struct CorrelationResult {
  i64 X = 0;
  i64 H = 0;
  std::vector<double> per_shift;  // per_shift[h-1] = c(h), h = 1..H
  double vf = 0.0;
  CorrMethod method = CorrMethod::direct;

  double c(i64 h) const;  // signed shift, |h| in [1, H]
};

CorrelationResult autocorr_direct(const ArithTable& coeffs, i64 H, int threads = 1);
CorrelationResult autocorr_fft(const ArithTable& coeffs, i64 H);

// Fejer-type majorant kernel: even, nonnegative, >= 1 on [-1, 1], Fourier
// transform supported in [-1/2, 1/2]. Phi(0) = pi^2/4, Phi(1) = 1.
double smoothing_kernel(double x);

// sum_{h in Z} c(h)^2 Phi(h/H), the smoothed majorant of V (includes h = 0).
double vf_smoothed(const ArithTable& coeffs, i64 H);

struct CircleCheckReport {
  double max_rel_deviation = 0.0;
  i64 argmax = 0;
  double h0_integral = 0.0;  // h = 0 row, equals the l^2 norm of the table
  double l2_norm_sq = 0.0;
};

// Compares c(h) against the circle-method integral evaluated exactly on a
// grid of 4X+2 points (the integrand is a trigonometric polynomial of degree
// < 2X, so the discrete mean is exact).
CircleCheckReport circle_integral_check(const ArithTable& coeffs, i64 H);

// Integral of |S(beta)|^2 over (arc union) intersected with
// [alpha - window, alpha + window].
double arc_energy(const ArithTable& coeffs, const ArcDissection& arcs, double alpha,
                  double window);

struct HardyLittlewoodRow {
  i64 h = 0;
  double correlation = 0.0;     // sum_{X<n<=2X} Lambda(n) Lambda(n+h)
  double singular_series = 0.0; // S(h)
  double error = 0.0;           // correlation - S(h) X
  double normalized = 0.0;      // error / X^{0.6}
};

std::vector<HardyLittlewoodRow> hardy_littlewood_compare(i64 X, i64 H, i64 pmax);

}  // namespace cuspcorr
