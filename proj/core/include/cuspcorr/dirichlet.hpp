#pragma once

#include <vector>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/common.hpp"
#include "cuspcorr/forms.hpp"

namespace cuspcorr {

// One cyclic component of (Z/qZ)^* with a fixed generator and a discrete-log
// table; the 2-part with modulus >= 8 contributes two components ({-1} and 5).
struct CharComponent {
  i64 modulus = 1;   // p^e
  i64 order = 1;     // order of this cyclic factor
  std::vector<i64> dlog;  // dlog[x mod p^e], -1 when not a unit
};

struct DirichletCharacter {
  std::vector<i64> exps;  // exponent against each component generator
  bool is_principal = false;
  bool is_primitive = false;
  i64 conductor = 1;
};

// All Dirichlet characters mod q, stored as integer exponent vectors; complex
// values are materialized on demand through a common root-of-unity table.
class CharacterTable {
 public:
  explicit CharacterTable(i64 q);

  i64 modulus() const { return q_; }
  i64 size() const { return (i64)chars_.size(); }  // = phi(q)
  const DirichletCharacter& character(i64 idx) const { return chars_[(std::size_t)idx]; }

  // Exponent r with chi(n) = e(r / D), or -1 when gcd(n, q) > 1.
  i64 value_exponent(i64 idx, i64 n) const;
  cplx value(i64 idx, i64 n) const;
  i64 denominator() const { return denom_; }

  i64 principal_index() const;
  std::vector<i64> primitive_indices() const;

 private:
  i64 q_ = 1;
  i64 denom_ = 1;  // common denominator of all value exponents
  std::vector<CharComponent> comps_;
  std::vector<DirichletCharacter> chars_;
  std::vector<cplx> roots_;  // denom_-th roots of unity
};

// Number of primitive characters mod q via sum_{d|q} mu(q/d) phi(d).
i64 primitive_character_count(i64 q);

// Gauss sum tau(chi) = sum_n chi(n) e(n/q).
cplx gauss_sum(const CharacterTable& table, i64 idx);

// sum_{M <= n <= 2M} lambda(n) chi(n) / n^{1/2 + it}.
cplx twisted_polynomial(const CuspForm& form, const CharacterTable& table, i64 idx,
                        i64 M, double t);

struct Moment4Report {
  double value = 0.0;        // sum over primitive chi of the fourth-moment integral
  double normalized = 0.0;   // value / (q T (log qTM)^c)
  double log_exponent = 3.0; // the configured c
  std::vector<double> per_char;  // one integral per primitive character
  int doublings = 0;
};

Moment4Report moment4(const CuspForm& form, i64 q, double T, i64 M,
                      int quadrature_points = 16, double log_exponent = 3.0);

struct MvtReport {
  double lhs = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
};

// Mean-value-theorem ratio: all characters mod q, coefficients supported on
// [X/2, 4X].
MvtReport mvt_ratio(const ArithTable& coeffs, i64 X, i64 q, double T0, double T,
                    int quadrature_points = 16);

struct TwistedEnergyReport {
  double value = 0.0;       // (1/X) integral of the character-summed window energy
  double normalized = 0.0;  // value / (H^2 / (log X)^B)
  double log_exponent = 2.0;
};

TwistedEnergyReport twisted_window_energy(const CuspForm& form, i64 q, i64 X, i64 H,
                                          double log_exponent = 2.0);

}  // namespace cuspcorr
