#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cuspcorr/dirichlet.hpp"

using namespace cuspcorr;

namespace {

i64 euler_phi_ref(i64 n) {
  i64 phi = n;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    phi -= phi / p;
  }
  if (n > 1) phi -= phi / n;
  return phi;
}

// Brute-force conductor: smallest d | q with chi trivial on n = 1 (mod d).
i64 conductor_oracle(const CharacterTable& t, i64 idx) {
  i64 q = t.modulus();
  for (i64 d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    bool trivial = true;
    for (i64 n = 1; n <= q; n += d) {
      if (std::gcd(n, q) != 1) continue;
      if (t.value_exponent(idx, n) != 0) {
        trivial = false;
        break;
      }
    }
    if (trivial) return d;
  }
  return q;
}

}  // namespace

TEST_CASE("character table construction") {
  CharacterTable t1(1);
  CHECK(t1.size() == 1);
  CHECK(t1.character(0).is_principal);
  CHECK(t1.character(0).is_primitive);
  CHECK(std::abs(t1.value(0, 5) - cplx{1.0, 0.0}) <= 1e-15);

  CharacterTable t3(3);
  CHECK(t3.size() == 2);
  i64 pr = t3.principal_index();
  i64 other = 1 - pr;
  CHECK(t3.value(other, 2).real() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(t3.character(other).is_primitive);
  CHECK(t3.character(other).conductor == 3);

  CharacterTable t8(8);
  CHECK(t8.size() == 4);
  CHECK(t8.primitive_indices().size() == 2);

  CHECK_THROWS_AS(CharacterTable(0), parameter_error);
  CHECK_THROWS_AS(CharacterTable(10001), parameter_error);
}

TEST_CASE("character counts and orthogonality for q <= 60") {
  for (i64 q = 1; q <= 60; ++q) {
    CharacterTable t(q);
    CHECK(t.size() == euler_phi_ref(q));

    // row orthogonality: sum_n chi_i(n) conj(chi_j(n)) = phi(q) delta_ij
    for (i64 i = 0; i < t.size(); ++i)
      for (i64 j = i; j < t.size(); ++j) {
        KahanSumC s;
        for (i64 n = 0; n < q; ++n) s.add(t.value(i, n) * std::conj(t.value(j, n)));
        double expect = (i == j) ? (double)t.size() : 0.0;
        CHECK(std::abs(s.value() - cplx{expect, 0.0}) <= 1e-10);
      }
  }
}

TEST_CASE("complete multiplicativity") {
  for (i64 q : {5, 8, 12, 15, 36}) {
    CharacterTable t(q);
    for (i64 i = 0; i < t.size(); ++i)
      for (i64 m = 0; m < q; ++m)
        for (i64 n = 0; n < q; ++n) {
          cplx lhs = t.value(i, m * n);
          cplx rhs = t.value(i, m) * t.value(i, n);
          CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
  }
}

TEST_CASE("conductors and primitivity") {
  for (i64 q = 1; q <= 200; ++q) {
    CharacterTable t(q);
    i64 primitive = 0;
    for (i64 i = 0; i < t.size(); ++i) {
      i64 cond = conductor_oracle(t, i);
      CHECK(t.character(i).conductor == cond);
      if (t.character(i).is_primitive) ++primitive;
      CHECK(t.character(i).is_primitive == (cond == q));
    }
    CHECK(primitive == primitive_character_count(q));
  }
}

TEST_CASE("gauss sums of primitive characters have magnitude sqrt q") {
  for (i64 q = 1; q <= 100; ++q) {
    CharacterTable t(q);
    for (i64 idx : t.primitive_indices()) {
      cplx g = gauss_sum(t, idx);
      CHECK(std::abs(g) == doctest::Approx(std::sqrt((double)q)).epsilon(1e-10));
    }
  }
}

TEST_CASE("twisted polynomial") {
  CuspForm d = build_delta(64);
  CharacterTable t1(1);

  SUBCASE("empty range") {
    CHECK(std::abs(twisted_polynomial(d, t1, 0, 0, 1.3)) == 0.0);
  }
  SUBCASE("two-term value at M=1") {
    cplx v = twisted_polynomial(d, t1, 0, 1, 0.0);
    CHECK(v.real() == doctest::Approx(0.625).epsilon(1e-12));  // 1 - 24/2^6
    CHECK(std::abs(v.imag()) <= 1e-15);
  }
  SUBCASE("conjugation symmetry") {
    CharacterTable t5(5);
    for (i64 i = 0; i < t5.size(); ++i) {
      // locate the conjugate character by matching values
      i64 conj_idx = -1;
      for (i64 j = 0; j < t5.size(); ++j) {
        bool match = true;
        for (i64 n = 0; n < 5 && match; ++n)
          match = std::abs(t5.value(j, n) - std::conj(t5.value(i, n))) <= 1e-12;
        if (match) conj_idx = j;
      }
      REQUIRE(conj_idx >= 0);
      cplx a = twisted_polynomial(d, t5, i, 8, 1.7);
      cplx b = twisted_polynomial(d, t5, conj_idx, 8, -1.7);
      CHECK(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));
    }
  }
}

TEST_CASE("fourth moment") {
  CuspForm d = build_delta(4096);

  SUBCASE("no primitive characters mod 2") {
    Moment4Report r = moment4(d, 2, 50.0, 16);
    CHECK(r.value == 0.0);
    CHECK(r.per_char.empty());
  }
  SUBCASE("closed-form oracle at q=1, M=1") {
    double a = d.lambda(2) / std::sqrt(2.0);
    double th = std::log(2.0);
    for (double T : {50.0, 100.0}) {
      auto anti = [&](double t) {
        return ((1.0 + a * a) * (1.0 + a * a) + 2.0 * a * a) * t +
               4.0 * a * (1.0 + a * a) * std::sin(th * t) / th +
               2.0 * a * a * std::sin(2.0 * th * t) / (2.0 * th);
      };
      double oracle = anti(T) - anti(T / 2.0);
      Moment4Report r = moment4(d, 1, T, 1);
      CHECK(r.value == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
  SUBCASE("per-character contributions are nonnegative and additive") {
    Moment4Report r = moment4(d, 8, 50.0, 64);
    CHECK(r.per_char.size() == 2);
    double sum = 0.0;
    for (double v : r.per_char) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(r.value == doctest::Approx(sum).epsilon(1e-12));
  }
  SUBCASE("normalized ratio is finite") {
    Moment4Report r = moment4(d, 5, 50.0, 128);
    CHECK(r.normalized > 0.0);
    CHECK(r.normalized < 100.0);
  }
}

TEST_CASE("mean value theorem ratio") {
  SUBCASE("zero input") {
    ArithTable z = make_table(512, 4096, "zero");
    MvtReport r = mvt_ratio(z, 1024, 1, 0.0, 50.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.ratio == 0.0);
  }
  SUBCASE("single-coefficient closed form") {
    ArithTable t = make_table(512, 4096, "single");
    t.ref(1000) = 3.0;
    double T = 100.0, X = 1024.0, n0 = 1000.0, c = 3.0;
    MvtReport r = mvt_ratio(t, 1024, 1, 0.0, T);
    CHECK(r.lhs == doctest::Approx(T * c * c / n0).epsilon(1e-8));
    double expect_ratio = T * X / (n0 * (T + X));
    CHECK(r.ratio == doctest::Approx(expect_ratio).epsilon(1e-8));
    CHECK(r.ratio <= 2.0);
  }
  SUBCASE("random signs stay inside the calibration envelope") {
    Xoshiro256 rng(13);
    ArithTable t = make_table(512, 4096, "pm1");
    for (auto& v : t.values) v = rng.next_unit() < 0.5 ? -1.0 : 1.0;
    MvtReport r = mvt_ratio(t, 1024, 5, 0.0, 200.0);
    CHECK(r.ratio <= 30.0);
    MvtReport r1 = mvt_ratio(t, 1024, 1, 0.0, 200.0);
    CHECK(r1.ratio <= 30.0);
  }
}

TEST_CASE("twisted window energy") {
  CuspForm d = build_delta(2100);

  SUBCASE("zero window") {
    TwistedEnergyReport r = twisted_window_energy(d, 3, 500, 0);
    CHECK(r.value == 0.0);
  }
  SUBCASE("principal q=1 equals the brute-force variance") {
    TwistedEnergyReport r = twisted_window_energy(d, 1, 1000, 50);
    ArithTable lf = lambda_f_table(d, 1001, 2050);
    KahanSum brute;
    for (i64 m = 1000; m <= 1999; ++m) {
      KahanSum w;
      for (i64 n = m + 1; n <= m + 50; ++n) w.add(lf.at_or_zero(n));
      brute.add(w.value() * w.value());
    }
    double expect = brute.value() / 1000.0;
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("orthogonality expansion at q=5") {
    i64 X = 500, H = 40;
    TwistedEnergyReport r = twisted_window_energy(d, 5, X, H);
    // phi(q) * sum over coprime residue classes of the class-restricted energy
    ArithTable lf = lambda_f_table(d, X + 1, 2 * X + H);
    KahanSum total;
    for (i64 m = X; m <= 2 * X - 1; ++m) {
      for (i64 rcls = 1; rcls <= 4; ++rcls) {
        KahanSum w;
        for (i64 n = m + 1; n <= m + H; ++n)
          if (n % 5 == rcls) w.add(lf.at_or_zero(n));
        total.add(4.0 * w.value() * w.value());
      }
    }
    double expect = total.value() / (double)X;
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(twisted_window_energy(d, 101, 100, 10), parameter_error);
    CHECK_THROWS_AS(twisted_window_energy(d, 3, 2000, 200), parameter_error);
  }
}
