#pragma once

#include <vector>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/common.hpp"
#include "cuspcorr/forms.hpp"

namespace cuspcorr {

enum class ArcVariant { theorem1, theorem2 };

struct MajorArc {
  i64 a = 0;
  i64 q = 1;
  double center = 0.0;
  double halfwidth = 0.0;
};

// Major/minor dissection of [0,1] around Farey fractions a/q, q <= Q.
struct ArcDissection {
  i64 X = 0;
  i64 H = 0;
  double A = 1.0;
  double eps = 0.0;
  ArcVariant variant = ArcVariant::theorem1;
  double Q = 0.0;
  double R = 0.0;
  std::vector<MajorArc> majors;                     // sorted by center
  std::vector<std::pair<double, double>> merged;    // disjoint union of arcs
  double major_measure = 0.0;
};

struct RationalApprox {
  i64 a = 0;
  i64 q = 1;
  double err = 0.0;
};

// sum over the table of coeffs(n) e(n alpha), compensated summation.
cplx exp_sum(const ArithTable& coeffs, double alpha);

// sum with an exact rational phase e(n a / q) over n in [lo, hi].
cplx exp_sum_rational(const ArithTable& coeffs, i64 lo, i64 hi, i64 a, i64 q);

struct WiltonValue {
  cplx sum;
  double ratio = 0.0;  // |sum| / (sqrt(y) log y), defined for y >= 2
};

WiltonValue wilton_sum(const CuspForm& form, i64 y, double theta);

// Continued-fraction convergent with q <= R and |alpha - a/q| <= 1/(qR).
RationalApprox dirichlet_approx(double alpha, double R);

// Exponent constant defaults; every (log X)^{O(1)} in the arc parameters is
// realized as a configurable power.
struct ArcConstants {
  double c0 = 1.0;  // extra log-power in Q
};

ArcDissection build_arcs(i64 X, i64 H, double A, double eps, ArcVariant variant,
                         const ArcConstants& consts = {});

struct Classification {
  bool major = false;
  RationalApprox witness;
};

Classification classify_alpha(const ArcDissection& arcs, double alpha);

struct GallagherReport {
  double lhs = 0.0;  // integral of |S|^2 over [a/q - 1/Y, a/q + 1/Y]
  double rhs = 0.0;  // (1/Y^2) * integral over u of the windowed sum
  double ratio = 0.0;
  bool degenerate = false;
  int grid_doublings = 0;
};

GallagherReport gallagher_ratio(const ArithTable& coeffs, i64 a, i64 q, i64 Y);

struct VaughanSums {
  cplx S, S1, S2, S3, S4;
  double residual = 0.0;  // |S - (S1 + S2 - S3 + S4)|
};

// Four-sum decomposition of sum_{X < n <= X+H} Lambda_f(n) e(n alpha).
VaughanSums vaughan_decompose(const CuspForm& form, i64 X, i64 H, double alpha,
                              i64 U, i64 V);

struct PointwiseBoundReport {
  double sum_abs = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
};

struct PointwiseConstants {
  double c1 = 2.0;       // (log x)^{c1} in the envelope
  double c_window = 0.0; // (log x)^{c_window} in the H lower bound
};

// |sum_{x <= n <= x+H} lambda(n) Lambda(n) e(n a/q)| against the four-term
// envelope, for empirical monitoring.
PointwiseBoundReport pointwise_bound_ratio(const CuspForm& form, i64 x, i64 H,
                                           i64 a, i64 q,
                                           const PointwiseConstants& consts = {});

}  // namespace cuspcorr
