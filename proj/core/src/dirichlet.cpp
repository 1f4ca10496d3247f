#include "cuspcorr/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cuspcorr {

namespace {

i64 pow_mod(i64 base, i64 exp, i64 mod) {
  i64 r = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) r = r * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return r;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
  std::vector<std::pair<i64, int>> f;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

i64 euler_phi(i64 n) {
  i64 phi = n;
  for (auto [p, e] : factorize(n)) phi -= phi / p;
  return phi;
}

// Smallest generator of the cyclic group (Z/p^e)^*, p odd.
i64 find_generator(i64 pe, i64 p) {
  i64 phi = euler_phi(pe);
  std::vector<i64> prime_factors;
  for (auto [pf, e] : factorize(phi)) prime_factors.push_back(pf);
  for (i64 g = 2; g < pe; ++g) {
    if (g % p == 0) continue;
    bool ok = true;
    for (i64 pf : prime_factors)
      if (pow_mod(g, phi / pf, pe) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw consistency_error("no generator found (non-cyclic unit group?)");
}

CharComponent make_cyclic_component(i64 pe, i64 gen, i64 order) {
  CharComponent comp;
  comp.modulus = pe;
  comp.order = order;
  comp.dlog.assign((std::size_t)pe, -1);
  i64 x = 1 % pe;
  for (i64 t = 0; t < order; ++t) {
    comp.dlog[(std::size_t)x] = t;
    x = (pe == 1) ? 0 : x * gen % pe;
  }
  return comp;
}

}  // namespace

CharacterTable::CharacterTable(i64 q) : q_(q) {
  if (q < 1 || q > 10'000) throw parameter_error("q must be in [1, 1e4]");

  struct CompMeta {
    i64 prime;          // 0 marks the sign component of the 2-part
    int exponent;       // e with modulus = p^e (2-part sign: modulus 2^e too)
  };
  std::vector<CompMeta> meta;

  for (auto [p, e] : factorize(q)) {
    i64 pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (p == 2) {
      if (e == 1) continue;  // trivial unit group
      if (e == 2) {
        comps_.push_back(make_cyclic_component(4, 3, 2));
        meta.push_back({2, 2});
      } else {
        // {-1} x <5>: fill both discrete logs over one table pair
        CharComponent sign_comp, five_comp;
        sign_comp.modulus = pe;
        sign_comp.order = 2;
        sign_comp.dlog.assign((std::size_t)pe, -1);
        five_comp.modulus = pe;
        five_comp.order = pe / 4;
        five_comp.dlog.assign((std::size_t)pe, -1);
        i64 x = 1;
        for (i64 t = 0; t < pe / 4; ++t) {
          sign_comp.dlog[(std::size_t)x] = 0;
          five_comp.dlog[(std::size_t)x] = t;
          sign_comp.dlog[(std::size_t)(pe - x)] = 1;
          five_comp.dlog[(std::size_t)(pe - x)] = t;
          x = x * 5 % pe;
        }
        comps_.push_back(std::move(sign_comp));
        meta.push_back({0, e});
        comps_.push_back(std::move(five_comp));
        meta.push_back({2, e});
      }
    } else {
      i64 gen = find_generator(pe, p);
      comps_.push_back(make_cyclic_component(pe, gen, euler_phi(pe)));
      meta.push_back({p, e});
    }
  }

  denom_ = 1;
  for (const auto& c : comps_) denom_ = std::lcm(denom_, c.order);
  roots_.resize((std::size_t)denom_);
  for (i64 r = 0; r < denom_; ++r) {
    double ang = 2.0 * M_PI * (double)r / (double)denom_;
    roots_[(std::size_t)r] = {std::cos(ang), std::sin(ang)};
  }

  // Enumerate all exponent vectors.
  i64 count = 1;
  for (const auto& c : comps_) count *= c.order;
  chars_.reserve((std::size_t)count);
  std::vector<i64> exps(comps_.size(), 0);
  for (i64 idx = 0; idx < count; ++idx) {
    DirichletCharacter ch;
    ch.exps = exps;
    ch.is_principal = std::all_of(exps.begin(), exps.end(), [](i64 e) { return e == 0; });
    // conductor componentwise
    i64 cond = 1;
    for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
      i64 a = exps[ci];
      if (a == 0) continue;
      const auto& mm = meta[ci];
      if (mm.prime == 0) {
        // sign character of the 2-part, the lift of the character mod 4
        cond = std::lcm(cond, (i64)4);
      } else if (mm.prime == 2) {
        if (mm.exponent == 2) {
          cond = std::lcm(cond, (i64)4);
        } else {
          i64 ord5 = comps_[ci].order;  // 2^{e-2}
          i64 o = ord5 / std::gcd(a, ord5);
          cond = std::lcm(cond, 4 * o);
        }
      } else {
        i64 phi = comps_[ci].order;
        i64 o = phi / std::gcd(a, phi);
        // o = p^s t with t | p-1; conductor p^{s+1}
        i64 ps = 1;
        while (o % mm.prime == 0) {
          o /= mm.prime;
          ps *= mm.prime;
        }
        cond = std::lcm(cond, ps * mm.prime);
      }
    }
    ch.conductor = cond;
    ch.is_primitive = (cond == q_);
    chars_.push_back(std::move(ch));
    // increment mixed-radix counter
    for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
      if (++exps[ci] < comps_[ci].order) break;
      exps[ci] = 0;
    }
  }
  if (q_ == 1) chars_[0].is_primitive = true;  // the trivial character
}

i64 CharacterTable::value_exponent(i64 idx, i64 n) const {
  if (idx < 0 || idx >= size()) throw parameter_error("character index out of range");
  const DirichletCharacter& ch = chars_[(std::size_t)idx];
  i64 nr = ((n % q_) + q_) % q_;
  if (q_ == 1) return 0;
  if (std::gcd(nr, q_) != 1) return -1;
  i64 r = 0;
  for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
    const auto& c = comps_[ci];
    i64 d = c.dlog[(std::size_t)(nr % c.modulus)];
    r += ch.exps[ci] * d % denom_ * (denom_ / c.order) % denom_;
  }
  return r % denom_;
}

cplx CharacterTable::value(i64 idx, i64 n) const {
  i64 r = value_exponent(idx, n);
  if (r < 0) return {0.0, 0.0};
  return roots_[(std::size_t)r];
}

i64 CharacterTable::principal_index() const {
  for (i64 i = 0; i < size(); ++i)
    if (chars_[(std::size_t)i].is_principal) return i;
  throw consistency_error("principal character missing");
}

std::vector<i64> CharacterTable::primitive_indices() const {
  std::vector<i64> out;
  for (i64 i = 0; i < size(); ++i)
    if (chars_[(std::size_t)i].is_primitive) out.push_back(i);
  return out;
}

i64 primitive_character_count(i64 q) {
  // sum_{d | q} mu(q/d) phi(d)
  i64 total = 0;
  for (i64 d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    i64 m = q / d;
    // mu(m)
    i64 mu = 1;
    for (auto [p, e] : factorize(m)) {
      if (e > 1) {
        mu = 0;
        break;
      }
      mu = -mu;
    }
    if (mu != 0) total += mu * euler_phi(d);
  }
  return total;
}

cplx gauss_sum(const CharacterTable& table, i64 idx) {
  i64 q = table.modulus();
  KahanSumC acc;
  for (i64 n = 0; n < q; ++n) {
    cplx ch = table.value(idx, n);
    if (ch == cplx{0.0, 0.0}) continue;
    double ang = 2.0 * M_PI * (double)n / (double)q;
    acc.add(ch * cplx{std::cos(ang), std::sin(ang)});
  }
  return acc.value();
}

cplx twisted_polynomial(const CuspForm& form, const CharacterTable& table, i64 idx,
                        i64 M, double t) {
  if (2 * M > form.ncoeffs()) throw parameter_error("2M exceeds coefficient table");
  KahanSumC acc;
  for (i64 n = M; n <= 2 * M; ++n) {
    if (n < 1) continue;
    cplx ch = table.value(idx, n);
    if (ch == cplx{0.0, 0.0}) continue;
    double ln = std::log((double)n);
    cplx phase{std::cos(-t * ln), std::sin(-t * ln)};
    acc.add(form.lambda(n) / std::sqrt((double)n) * ch * phase);
  }
  return acc.value();
}

namespace {

// Nodes and weights of n-point Gauss-Legendre on [-1, 1], Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize((std::size_t)n);
  weights.resize((std::size_t)n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * ((double)i + 0.75) / ((double)n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - (double)j * p2) / (double)(j + 1);
      }
      pp = (double)n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[(std::size_t)i] = -x;
    nodes[(std::size_t)(n - 1 - i)] = x;
    weights[(std::size_t)i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[(std::size_t)(n - 1 - i)] = weights[(std::size_t)i];
  }
}

struct TwistedSeries {
  std::vector<cplx> coeff;  // lambda(n) chi(n) / sqrt(n), nonzero entries
  std::vector<double> logn;
  cplx eval(double t) const {
    KahanSumC acc;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      double a = -t * logn[i];
      acc.add(coeff[i] * cplx{std::cos(a), std::sin(a)});
    }
    return acc.value();
  }
};

// Integral over [lo, hi] of pow(|P(t)|, power) with panel-doubling control.
double oscillatory_integral(const TwistedSeries& series, double lo, double hi,
                            double panel_cap, int gl_points, int power,
                            int* doublings_out) {
  std::vector<double> nodes, weights;
  gauss_legendre(gl_points, nodes, weights);
  i64 panels = std::max<i64>(1, (i64)std::ceil((hi - lo) / panel_cap));
  double prev = 0.0;
  for (int d = 0; d <= 8; ++d) {
    double width = (hi - lo) / (double)panels;
    KahanSum acc;
    for (i64 p = 0; p < panels; ++p) {
      double a = lo + width * (double)p;
      double mid = a + 0.5 * width, half = 0.5 * width;
      for (int g = 0; g < gl_points; ++g) {
        double t = mid + half * nodes[(std::size_t)g];
        double v = std::abs(series.eval(t));
        double integrand = (power == 2) ? v * v : v * v * v * v;
        acc.add(weights[(std::size_t)g] * half * integrand);
      }
    }
    double cur = acc.value();
    if (d > 0 && std::abs(cur - prev) <= 1e-4 * std::abs(cur) + 1e-300) {
      if (doublings_out) *doublings_out = d;
      return cur;
    }
    prev = cur;
    panels *= 2;
  }
  throw numeric_instability_error("moment quadrature did not settle under doubling");
}

}  // namespace

Moment4Report moment4(const CuspForm& form, i64 q, double T, i64 M,
                      int quadrature_points, double log_exponent) {
  if (T < 2.0 || M < 1) throw parameter_error("need T >= 2 and M >= 1");
  if (2 * M > form.ncoeffs()) throw parameter_error("2M exceeds coefficient table");
  if (quadrature_points < 4) throw parameter_error("quadrature_points must be >= 4");

  CharacterTable table(q);
  Moment4Report rep;
  rep.log_exponent = log_exponent;
  double panel_cap = M_PI / std::log(4.0 * (double)M + 4.0);
  for (i64 idx : table.primitive_indices()) {
    TwistedSeries series;
    for (i64 n = M; n <= 2 * M; ++n) {
      cplx ch = table.value(idx, n);
      if (ch == cplx{0.0, 0.0}) continue;
      double lam = form.lambda(n);
      if (lam == 0.0) continue;
      series.coeff.push_back(lam / std::sqrt((double)n) * ch);
      series.logn.push_back(std::log((double)n));
    }
    int dl = 0;
    double integral =
        series.coeff.empty()
            ? 0.0
            : oscillatory_integral(series, T / 2.0, T, panel_cap, quadrature_points, 4, &dl);
    rep.per_char.push_back(integral);
    rep.value += integral;
    rep.doublings = std::max(rep.doublings, dl);
  }
  double lg = std::log((double)q * T * (double)M);
  rep.normalized = rep.value / ((double)q * T * std::pow(lg, log_exponent));
  return rep;
}

MvtReport mvt_ratio(const ArithTable& coeffs, i64 X, i64 q, double T0, double T,
                    int quadrature_points) {
  if (T <= 0.0) throw parameter_error("T must be positive");
  if (coeffs.lo < X / 2 || coeffs.hi > 4 * X)
    throw parameter_error("coefficients must be supported on [X/2, 4X]");
  CharacterTable table(q);

  double l2 = 0.0;
  for (double v : coeffs.values) l2 += v * v;

  MvtReport rep;
  double panel_cap = M_PI / std::log(4.0 * (double)coeffs.hi + 4.0);
  for (i64 idx = 0; idx < table.size(); ++idx) {
    TwistedSeries series;
    for (i64 n = coeffs.lo; n <= coeffs.hi; ++n) {
      double c = coeffs.at(n);
      if (c == 0.0) continue;
      cplx ch = table.value(idx, n);
      if (ch == cplx{0.0, 0.0}) continue;
      series.coeff.push_back(c / std::sqrt((double)n) * ch);
      series.logn.push_back(std::log((double)n));
    }
    if (series.coeff.empty()) continue;
    rep.lhs += oscillatory_integral(series, T0, T0 + T, panel_cap, quadrature_points,
                                    2, nullptr);
  }
  double dX = (double)X, dq = (double)q;
  if (q == 1)
    rep.envelope = (T + dX) / dX * l2;
  else
    rep.envelope = (dq * T + dX) / dX * l2 *
                   std::pow(std::log(dq * T * dX), 3.0);
  rep.ratio = rep.envelope > 0.0 ? rep.lhs / rep.envelope : 0.0;
  return rep;
}

TwistedEnergyReport twisted_window_energy(const CuspForm& form, i64 q, i64 X, i64 H,
                                          double log_exponent) {
  if (q < 1 || q > 100) throw parameter_error("q must be in [1, 100]");
  if (H < 0) throw parameter_error("H must be >= 0");
  if (2 * X + H > form.ncoeffs()) throw parameter_error("window exceeds table");
  TwistedEnergyReport rep;
  rep.log_exponent = log_exponent;
  if (H == 0 || X < 1) return rep;

  CharacterTable table(q);
  ArithTable lam_f = lambda_f_table(form, X + 1, 2 * X + H);

  KahanSum total;
  for (i64 idx = 0; idx < table.size(); ++idx) {
    // The x-integrand is constant between integers: exact window sliding.
    auto term = [&](i64 n) -> cplx {
      double c = lam_f.at_or_zero(n);
      if (c == 0.0) return {0.0, 0.0};
      return c * table.value(idx, n);
    };
    cplx window{0.0, 0.0};
    for (i64 n = X + 1; n <= X + H; ++n) window += term(n);
    for (i64 m = X; m <= 2 * X - 1; ++m) {
      if ((m - X) % 1024 == 0) {
        KahanSumC w;
        for (i64 n = m + 1; n <= m + H; ++n) w.add(term(n));
        window = w.value();
      }
      total.add(std::norm(window));
      window -= term(m + 1);
      window += term(m + 1 + H);
    }
  }
  rep.value = total.value() / (double)X;
  double lg = std::log((double)X);
  rep.normalized = rep.value / ((double)H * (double)H / std::pow(lg, log_exponent));
  return rep;
}

}  // namespace cuspcorr
