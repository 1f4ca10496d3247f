#include "cuspcorr/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cuspcorr {

namespace {

// Exact q-th roots of unity; phases of e(n a / q) never drift.
std::vector<cplx> root_table(i64 q) {
  std::vector<cplx> roots((std::size_t)q);
  for (i64 r = 0; r < q; ++r) {
    double ang = 2.0 * M_PI * (double)r / (double)q;
    roots[(std::size_t)r] = {std::cos(ang), std::sin(ang)};
  }
  return roots;
}

void require_reduced(i64 a, i64 q) {
  if (q < 1) throw parameter_error("modulus q must be >= 1");
  if (std::gcd(((a % q) + q) % q, q) != 1 && q > 1)
    throw parameter_error("fraction a/q must be reduced");
}

}  // namespace

cplx exp_sum(const ArithTable& coeffs, double alpha) {
  KahanSumC acc;
  for (i64 n = coeffs.lo; n <= coeffs.hi; ++n) {
    double c = coeffs.at(n);
    if (c == 0.0) continue;
    acc.add(c * unit_phase_scaled(n, alpha));
  }
  return acc.value();
}

cplx exp_sum_rational(const ArithTable& coeffs, i64 lo, i64 hi, i64 a, i64 q) {
  require_reduced(a, q);
  std::vector<cplx> roots = root_table(q);
  i64 ar = ((a % q) + q) % q;
  KahanSumC acc;
  lo = std::max(lo, coeffs.lo);
  hi = std::min(hi, coeffs.hi);
  for (i64 n = lo; n <= hi; ++n) {
    double c = coeffs.at(n);
    if (c == 0.0) continue;
    acc.add(c * roots[(std::size_t)((n % q) * ar % q)]);
  }
  return acc.value();
}

WiltonValue wilton_sum(const CuspForm& form, i64 y, double theta) {
  if (y < 1) throw parameter_error("y must be >= 1");
  if (y > form.ncoeffs()) throw parameter_error("y exceeds coefficient table");
  KahanSumC acc;
  for (i64 n = 1; n <= y; ++n) acc.add(form.lambda(n) * unit_phase_scaled(n, theta));
  WiltonValue out;
  out.sum = acc.value();
  if (y >= 2)
    out.ratio = std::abs(out.sum) / (std::sqrt((double)y) * std::log((double)y));
  return out;
}

RationalApprox dirichlet_approx(double alpha, double R) {
  if (alpha < 0.0 || alpha > 1.0) throw parameter_error("alpha must be in [0, 1]");
  if (R < 1.0) throw parameter_error("R must be >= 1");
  // Continued-fraction convergents; the last with denominator <= R satisfies
  // |alpha - a/q| <= 1/(q q') < 1/(q R).
  i64 h2 = 1, k2 = 0;  // p_{-1}, q_{-1}
  i64 h1 = 0, k1 = 1;  // p_{-2} ... seeded so first step gives floor(alpha)/1
  double x = alpha;
  i64 best_a = (i64)std::floor(alpha), best_q = 1;
  for (int iter = 0; iter < 64; ++iter) {
    double fl = std::floor(x);
    if (fl > 9.0e17) break;
    i64 ai = (i64)fl;
    i64 h = ai * h2 + h1;
    i64 k = ai * k2 + k1;
    if ((double)k > R || k < 0) break;
    best_a = h;
    best_q = k;
    h1 = h2;
    k1 = k2;
    h2 = h;
    k2 = k;
    double frac = x - fl;
    if (frac < 1e-18) break;  // exact rational reached
    x = 1.0 / frac;
  }
  RationalApprox out;
  out.a = best_a;
  out.q = best_q;
  out.err = std::abs(alpha - (double)best_a / (double)best_q);
  return out;
}

ArcDissection build_arcs(i64 X, i64 H, double A, double eps, ArcVariant variant,
                         const ArcConstants& consts) {
  if (X < 16) throw parameter_error("X too small for an arc dissection");
  if (H < 1 || H >= X) throw parameter_error("H must be in [1, X-1]");
  double dX = (double)X, dH = (double)H, lg = std::log(dX);
  double lower = (variant == ArcVariant::theorem1) ? std::pow(dX, 2.0 / 3.0 + eps)
                                                   : std::pow(dX, 1.0 / 3.0 + eps);
  double upper = std::pow(dX, 1.0 - eps);
  if (dH < lower || dH > upper)
    throw parameter_error("H outside the admissible range for this variant");

  ArcDissection arcs;
  arcs.X = X;
  arcs.H = H;
  arcs.A = A;
  arcs.eps = eps;
  arcs.variant = variant;
  double t2_halfwidth = 0.0;
  if (variant == ArcVariant::theorem1) {
    arcs.Q = std::pow(dX, 1.0 / 3.0) * std::pow(lg, A / 3.0 + consts.c0);
    arcs.R = dH * std::pow(lg, -2.0 * A);
  } else {
    arcs.Q = std::pow(lg, 2.0 * A + consts.c0);
    t2_halfwidth = std::pow(lg, 3.0 * A) / dH;
    arcs.R = arcs.Q;  // approximation parameter used on the minor arcs
  }
  arcs.Q = std::max(arcs.Q, 1.0);
  arcs.R = std::max(arcs.R, 1.0);

  i64 qmax = (i64)std::floor(arcs.Q);
  auto push = [&](i64 a, i64 q) {
    double center = (double)a / (double)q;
    double hw = (variant == ArcVariant::theorem1) ? 1.0 / ((double)q * arcs.R)
                                                  : t2_halfwidth;
    arcs.majors.push_back({a, q, center, hw});
  };
  push(0, 1);
  push(1, 1);
  for (i64 q = 2; q <= qmax; ++q)
    for (i64 a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1) push(a, q);
  std::sort(arcs.majors.begin(), arcs.majors.end(),
            [](const MajorArc& l, const MajorArc& r) { return l.center < r.center; });

  // Disjoint union, clipped to [0, 1].
  std::vector<std::pair<double, double>> iv;
  iv.reserve(arcs.majors.size());
  for (const auto& m : arcs.majors) {
    double lo = std::max(0.0, m.center - m.halfwidth);
    double hi = std::min(1.0, m.center + m.halfwidth);
    if (hi > lo) iv.emplace_back(lo, hi);
  }
  std::sort(iv.begin(), iv.end());
  for (const auto& [lo, hi] : iv) {
    if (!arcs.merged.empty() && lo <= arcs.merged.back().second)
      arcs.merged.back().second = std::max(arcs.merged.back().second, hi);
    else
      arcs.merged.emplace_back(lo, hi);
  }
  for (const auto& [lo, hi] : arcs.merged) arcs.major_measure += hi - lo;
  return arcs;
}

Classification classify_alpha(const ArcDissection& arcs, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw parameter_error("alpha must be in [0, 1]");
  Classification out;
  auto it = std::upper_bound(
      arcs.merged.begin(), arcs.merged.end(), alpha,
      [](double v, const std::pair<double, double>& iv) { return v < iv.first; });
  if (it != arcs.merged.begin()) {
    --it;
    out.major = alpha <= it->second;
  }
  out.witness = dirichlet_approx(alpha, arcs.R);
  return out;
}

namespace {

// Composite Simpson for |S(beta)|^2 on [lo, hi] with n panels (n even).
double simpson_energy(const ArithTable& coeffs, double lo, double hi, i64 n) {
  auto f = [&](double beta) { return std::norm(exp_sum(coeffs, beta)); };
  double h = (hi - lo) / (double)n;
  KahanSum acc;
  acc.add(f(lo));
  acc.add(f(hi));
  for (i64 i = 1; i < n; ++i) acc.add(((i % 2) ? 4.0 : 2.0) * f(lo + h * (double)i));
  return acc.value() * h / 3.0;
}

}  // namespace

GallagherReport gallagher_ratio(const ArithTable& coeffs, i64 a, i64 q, i64 Y) {
  require_reduced(a, q);
  if (Y < 1) throw parameter_error("Y must be >= 1");
  i64 X = coeffs.lo - 1;
  if (coeffs.hi != 2 * X) throw parameter_error("coeffs must cover (X, 2X]");

  GallagherReport rep;
  bool all_zero = true;
  for (double v : coeffs.values)
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) {
    rep.degenerate = true;
    return rep;
  }

  // RHS: the u-integrand is constant between integers, so the integral is an
  // exact sum of window energies.
  std::vector<cplx> roots = root_table(q);
  i64 ar = ((a % q) + q) % q;
  auto phased = [&](i64 n) -> cplx {
    double c = coeffs.at_or_zero(n);
    if (c == 0.0) return {0.0, 0.0};
    return c * roots[(std::size_t)((n % q) * ar % q)];
  };
  KahanSum rhs_acc;
  cplx window{0.0, 0.0};
  for (i64 n = X + 1; n <= X + Y; ++n) window += phased(n);
  for (i64 m = X; m <= 2 * X - 1; ++m) {
    if ((m - X) % 1024 == 0) {  // periodic resync against drift
      KahanSumC w;
      for (i64 n = m + 1; n <= m + Y; ++n) w.add(phased(n));
      window = w.value();
    }
    rhs_acc.add(std::norm(window));
    window -= phased(m + 1);
    window += phased(m + 1 + Y);
  }
  rep.rhs = rhs_acc.value() / ((double)Y * (double)Y);

  double center = (double)a / (double)q;
  double lo = center - 1.0 / (double)Y, hi = center + 1.0 / (double)Y;
  i64 panels = 64 * ((X + Y - 1) / Y);
  if (panels % 2) ++panels;
  double prev = simpson_energy(coeffs, lo, hi, panels);
  for (int d = 0; d < 6; ++d) {
    panels *= 2;
    double cur = simpson_energy(coeffs, lo, hi, panels);
    ++rep.grid_doublings;
    double change = std::abs(cur - prev);
    prev = cur;
    if (change <= 0.01 * std::abs(cur) + 1e-300) {
      rep.lhs = cur;
      rep.ratio = rep.rhs != 0.0 ? rep.lhs / rep.rhs : 0.0;
      return rep;
    }
  }
  throw numeric_instability_error("gallagher quadrature did not settle under doubling");
}

VaughanSums vaughan_decompose(const CuspForm& form, i64 X, i64 H, double alpha,
                              i64 U, i64 V) {
  if (H < 0) throw parameter_error("H must be >= 0");
  if (U < 2 || V < 2) throw parameter_error("U and V must be >= 2");
  if (U * V > X + H) throw parameter_error("UV must be <= X+H");
  if (X + H > form.ncoeffs()) throw parameter_error("window exceeds coefficient table");

  VaughanSums out;
  if (H == 0) return out;
  const i64 top = X + H;

  ArithTable lam_f = lambda_f_table(form, 1, top);
  ArithTable mu = mu_f_table(form, 1, std::max(V, std::min(top, U * V)));

  KahanSumC s_acc, s1_acc, s2_acc, s3_acc, s4_acc;
  for (i64 n = X + 1; n <= top; ++n) {
    double c = lam_f.at(n);
    if (c == 0.0) continue;
    cplx term = c * unit_phase_scaled(n, alpha);
    s_acc.add(term);
    if (n <= U) s1_acc.add(term);
  }
  out.S = s_acc.value();
  out.S1 = s1_acc.value();

  // S2 = sum_{m <= V} mu_f(m) sum_{X < mn <= X+H} lambda(n) log(n) e(mn alpha)
  for (i64 m = 1; m <= V; ++m) {
    double mum = mu.at(m);
    if (mum == 0.0) continue;
    for (i64 n = X / m + 1; m * n <= top; ++n) {
      if (m * n <= X) continue;
      double c = form.lambda(n) * std::log((double)n);
      if (c == 0.0) continue;
      s2_acc.add(mum * c * unit_phase_scaled(m * n, alpha));
    }
  }
  out.S2 = s2_acc.value();

  // a_f(m) = sum_{bc = m, b <= U, c <= V} Lambda_f(b) mu_f(c), m <= UV.
  std::vector<double> af((std::size_t)(U * V) + 1, 0.0);
  for (i64 b = 1; b <= U; ++b) {
    double lb = lam_f.at(b);
    if (lb == 0.0) continue;
    for (i64 c = 1; c <= V && b * c <= U * V; ++c) {
      double mc = mu.at(c);
      if (mc != 0.0) af[(std::size_t)(b * c)] += lb * mc;
    }
  }
  for (i64 m = 1; m <= U * V; ++m) {
    if (af[(std::size_t)m] == 0.0) continue;
    for (i64 n = X / m + 1; m * n <= top; ++n) {
      if (m * n <= X) continue;
      s3_acc.add(af[(std::size_t)m] * form.lambda(n) * unit_phase_scaled(m * n, alpha));
    }
  }
  out.S3 = s3_acc.value();

  // b_f(n) = -sum_{d | n, d <= V} mu_f(d) lambda(n/d) for n > V. The sign
  // makes the decomposition close as S = S1 + S2 - S3 + S4.
  i64 bmax = top / (U + 1);
  std::vector<double> bf((std::size_t)std::max<i64>(bmax, 0) + 1, 0.0);
  for (i64 d = 1; d <= std::min(V, bmax); ++d) {
    double mud = mu.at(d);
    if (mud == 0.0) continue;
    for (i64 n = d; n <= bmax; n += d) bf[(std::size_t)n] -= mud * form.lambda(n / d);
  }
  for (i64 m = U + 1; m <= top / (V + 1); ++m) {
    double lm = lam_f.at(m);
    if (lm == 0.0) continue;
    for (i64 n = std::max(V, X / m) + 1; m * n <= top; ++n) {
      if (m * n <= X) continue;
      if (bf[(std::size_t)n] == 0.0) continue;
      s4_acc.add(lm * bf[(std::size_t)n] * unit_phase_scaled(m * n, alpha));
    }
  }
  out.S4 = s4_acc.value();

  out.residual = std::abs(out.S - (out.S1 + out.S2 - out.S3 + out.S4));
  if (out.residual > 1e-6 * (1.0 + std::abs(out.S)))
    throw consistency_error("vaughan identity residual exceeds tolerance");
  return out;
}

PointwiseBoundReport pointwise_bound_ratio(const CuspForm& form, i64 x, i64 H, i64 a,
                                           i64 q, const PointwiseConstants& consts) {
  require_reduced(a, q);
  double dx = (double)x, dH = (double)H, lg = std::log(dx);
  double lower = std::pow(dx, 2.0 / 3.0) * std::pow(lg, consts.c_window);
  if (dH < lower || dH > dx)
    throw parameter_error("H must satisfy x^{2/3} (log x)^c <= H <= x");
  if (x + H > form.ncoeffs()) throw parameter_error("window exceeds coefficient table");

  ArithTable w = lambda_vonmangoldt_table(form, x, x + H);
  cplx s = exp_sum_rational(w, x, x + H, a, q);
  PointwiseBoundReport rep;
  rep.sum_abs = std::abs(s);
  double dq = (double)q;
  rep.envelope = (dH / std::sqrt(dq) + std::sqrt(dx * dq) +
                  std::sqrt(dH) * std::cbrt(dx) + std::pow(dx, 2.0 / 3.0)) *
                 std::pow(lg, consts.c1);
  rep.ratio = rep.sum_abs / rep.envelope;
  return rep;
}

}  // namespace cuspcorr
