#pragma once

#include <vector>

#include "cuspcorr/common.hpp"
#include "cuspcorr/forms.hpp"

namespace cuspcorr {

// Kloosterman sum S(m, n; c), exact real symmetrization.
double kloosterman(i64 m, i64 n, i64 c);

// Modular inverses of all units mod c: inv[x] with x * inv[x] = 1 (mod c).
std::vector<i64> inverse_table(i64 c);

// J_nu(x) for integer order nu >= 1: ascending series for x <= nu + 2,
// backward (Miller) recurrence in the mid range, Hankel asymptotics beyond.
double bessel_j(int nu, double x);

struct PeterssonValue {
  int k = 0;
  i64 m = 0, n = 0;
  double value = 0.0;       // Delta_k(m,n) = 1_{m=n} + c-sum
  i64 truncation_c = 0;
  double tail_bound = 0.0;
  double imag_residue = 0.0;
};

// Petersson average Delta_k(m,n) = 1_{m=n} + 2 pi i^{-k} sum_{c<=cmax}
// S(m,n;c)/c * J_{k-1}(4 pi sqrt(mn)/c).
PeterssonValue petersson_delta(int k, i64 m, i64 n, i64 cmax);

// Geometric tail estimate for the c-sum truncated at cmax.
double petersson_tail_bound(int k, i64 m, i64 n, i64 cmax);

// Smallest cmax with tail bound <= eps (capped; throws truncation_error if
// unreachable).
i64 petersson_cmax_for(int k, i64 m, i64 n, double eps);

// All Delta_k(m,n) for m, n <= mmax with per-matrix truncation chosen so each
// tail bound is <= eps; inverse tables are shared across pairs.
std::vector<std::vector<PeterssonValue>> petersson_matrix(int k, i64 mmax, double eps);

// omega_f = Delta_k(1,1) for the one-dimensional spaces.
double harmonic_weight(int k, i64 cmax);

struct AveragedVfReport {
  double omega = 0.0;
  double vf = 0.0;
  double weighted_vf = 0.0;     // omega * V_f(X; H)
  double normalized = 0.0;      // weighted_vf / (H X^2)
  // Windowed-square cross-check at a sample (x, y, alpha):
  double direct = 0.0;          // omega |sum lambda Lambda e(n alpha)|^2
  double diagonal = 0.0;        // sum Lambda(n)^2 over the window
  double expansion = 0.0;       // diagonal + Petersson error terms
  double rel_gap = 0.0;         // |direct - expansion| / (1 + |direct|)
};

AveragedVfReport averaged_vf(const CuspForm& form, i64 X, i64 H, i64 cmax,
                             i64 sample_x, i64 sample_y, double sample_alpha);

}  // namespace cuspcorr
