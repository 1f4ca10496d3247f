#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numeric>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/petersson.hpp"

using namespace cuspcorr;

TEST_CASE("kloosterman exact small cases") {
  CHECK(kloosterman(1, 1, 1) == 1.0);
  CHECK(kloosterman(1, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1.0).epsilon(1e-14));
  // S(1,1;4): units 1,3 are self-inverse: e(2/4)+e(6/4) = -1 - 1 = -2
  CHECK(kloosterman(1, 1, 4) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK_THROWS_AS(kloosterman(1, 1, 0), parameter_error);
}

TEST_CASE("inverse tables are correct for composite moduli") {
  for (i64 c = 2; c <= 200; ++c) {
    auto inv = inverse_table(c);
    for (i64 x = 1; x < c; ++x) {
      if (std::gcd(x, c) == 1) {
        CHECK(inv[(std::size_t)x] != 0);
        CHECK(x * inv[(std::size_t)x] % c == 1);
      } else {
        CHECK(inv[(std::size_t)x] == 0);
      }
    }
  }
}

TEST_CASE("kloosterman symmetry and multiplicativity") {
  for (i64 c : {5, 6, 7, 9, 12}) {
    for (i64 m = 1; m <= 4; ++m)
      for (i64 n = m; n <= 4; ++n)
        CHECK(kloosterman(m, n, c) == doctest::Approx(kloosterman(n, m, c)).epsilon(1e-12));
  }
  // S(m, n; c1 c2) = S(m cbar2^2, n; c1) S(m cbar1^2, n; c2)
  auto invmod = [](i64 a, i64 m) {
    auto t = inverse_table(m);
    return t[(std::size_t)(a % m)];
  };
  for (auto [c1, c2] : {std::pair<i64, i64>{3, 4}, {4, 5}, {5, 7}, {8, 9}, {7, 9}}) {
    for (i64 m = 1; m <= 3; ++m)
      for (i64 n = 1; n <= 3; ++n) {
        double lhs = kloosterman(m, n, c1 * c2);
        i64 c2b = invmod(c2, c1), c1b = invmod(c1, c2);
        double rhs = kloosterman(m * c2b % c1 * c2b % c1, n, c1) *
                     kloosterman(m * c1b % c2 * c1b % c2, n, c2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
      }
  }
}

TEST_CASE("weil bound at primes") {
  for (i64 p : primes_upto(200))
    CHECK(std::abs(kloosterman(1, 1, p)) <= 2.0 * std::sqrt((double)p) + 1e-12);
}

TEST_CASE("kloosterman imaginary parts cancel") {
  // the sine part of the full exponential sum vanishes under x <-> -x
  for (i64 c : {5, 8, 13, 36, 97}) {
    for (auto [m, n] : {std::pair<i64, i64>{1, 1}, {2, 7}, {3, 5}}) {
      auto inv = inverse_table(c);
      KahanSum sines;
      for (i64 x = 1; x < c; ++x) {
        if (inv[(std::size_t)x] == 0) continue;
        double ang = 2.0 * M_PI * (double)((m * x + n * inv[(std::size_t)x]) % c) / (double)c;
        sines.add(std::sin(ang));
      }
      CHECK(std::abs(sines.value()) <= 1e-10);
    }
  }
}

TEST_CASE("bessel evaluation") {
  CHECK(bessel_j(11, 0.0) == 0.0);
  CHECK(bessel_j(1, 0.1) == doctest::Approx(0.049937526).epsilon(1e-8));
  CHECK_THROWS_AS(bessel_j(0, 1.0), parameter_error);
  CHECK_THROWS_AS(bessel_j(1, -1.0), parameter_error);

  SUBCASE("independent oracle across regimes") {
    for (int nu : {1, 2, 5, 11, 15, 19, 25}) {
      for (double x : {0.05, 0.7, 2.0, 6.0, 11.5, 20.0, 55.0, 130.0, 420.0, 2000.0,
                       13000.0}) {
        double ref = boost::math::cyl_bessel_j(nu, x);
        CHECK(bessel_j(nu, x) == doctest::Approx(ref).epsilon(5e-11).scale(1e-10));
      }
    }
  }
  SUBCASE("three-term recurrence identity") {
    for (int nu : {2, 7, 13}) {
      for (double x : {0.5, 3.0, 9.0, 31.0, 240.0}) {
        double lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x);
        double rhs = 2.0 * (double)nu / x * bessel_j(nu, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1e-10));
      }
    }
  }
}

TEST_CASE("petersson average at weight 12 is rank one") {
  CuspForm d = build_delta(32);

  SUBCASE("against the eigenvalue product, m != n") {
    double omega = harmonic_weight(12, 50);
    for (auto [m, n] : {std::pair<i64, i64>{2, 3}, {2, 5}, {3, 4}, {1, 6}}) {
      PeterssonValue v = petersson_delta(12, m, n, 50);
      CHECK(v.value ==
            doctest::Approx(omega * d.lambda(m) * d.lambda(n)).epsilon(1e-6));
    }
  }
  SUBCASE("ratio identity through the shared-modulus matrix") {
    auto mat = petersson_matrix(12, 8, 1e-8);
    double omega = mat[0][0].value;
    for (i64 m = 1; m <= 8; ++m)
      for (i64 n = 1; n <= 8; ++n)
        CHECK(mat[m - 1][n - 1].value / omega ==
              doctest::Approx(d.lambda(m) * d.lambda(n)).epsilon(1e-6));
  }
  SUBCASE("matrix agrees with the per-pair op") {
    auto mat = petersson_matrix(12, 4, 1e-10);
    for (i64 m = 1; m <= 4; ++m)
      for (i64 n = 1; n <= 4; ++n) {
        PeterssonValue v = petersson_delta(12, m, n, mat[m - 1][n - 1].truncation_c);
        CHECK(mat[m - 1][n - 1].value == doctest::Approx(v.value).epsilon(1e-12));
      }
  }
  SUBCASE("rank-1 factorization residual") {
    auto mat = petersson_matrix(12, 20, 1e-8);
    // residual of A - omega u u^T with u = lambda vector
    double omega = mat[0][0].value;
    double num = 0.0, den = 0.0;
    for (i64 m = 1; m <= 20; ++m)
      for (i64 n = 1; n <= 20; ++n) {
        double pred = omega * d.lambda(m) * d.lambda(n);
        double r = mat[m - 1][n - 1].value - pred;
        num += r * r;
        den += pred * pred;
      }
    CHECK(std::sqrt(num / den) <= 1e-5);
  }
}

TEST_CASE("dimension-zero weights annihilate the average") {
  // dim S_14 = 0: the c-sum must cancel the diagonal exactly
  for (auto [m, n] : {std::pair<i64, i64>{1, 1}, {2, 2}, {2, 3}}) {
    PeterssonValue v = petersson_delta(14, m, n, 60);
    CHECK(std::abs(v.value) <= 1e-6);
  }
}

TEST_CASE("truncation control") {
  CHECK_THROWS_AS(petersson_delta(12, 50, 50, 5), truncation_error);
  i64 c = petersson_cmax_for(12, 50, 50, 1e-8);
  CHECK(petersson_tail_bound(12, 50, 50, c) <= 1e-8);
  CHECK(petersson_tail_bound(12, 50, 50, c - 1) > 1e-8);
  PeterssonValue v = petersson_delta(12, 50, 50, c);
  CHECK(v.tail_bound <= 1e-8);
}

TEST_CASE("harmonic weights") {
  double w12 = harmonic_weight(12, 60);
  CHECK(w12 > 0.0);
  CHECK(std::abs(harmonic_weight(12, 30) - w12) <= 1e-8);
  CHECK_THROWS_AS(harmonic_weight(14, 60), unsupported_weight_error);

  CuspForm d = build_delta(8);
  CHECK(petersson_delta(12, 4, 1, 60).value ==
        doctest::Approx(w12 * d.lambda(4)).epsilon(1e-6));

  for (int k : {16, 18, 20, 22, 26}) {
    double w = harmonic_weight(k, 40);
    CHECK(w > 0.0);
    CuspForm f = build_form(k, 8);
    CHECK(petersson_delta(k, 2, 1, 40).value ==
          doctest::Approx(w * f.lambda(2)).epsilon(1e-6));
  }
}

TEST_CASE("averaged correlation two-route check") {
  SUBCASE("empty window gives zeros") {
    CuspForm d = build_delta(256);
    AveragedVfReport r = averaged_vf(d, 100, 0, 40, 64, 0, 0.3);
    CHECK(r.vf == 0.0);
    CHECK(r.weighted_vf == 0.0);
  }
  SUBCASE("low weight, small sample") {
    CuspForm d = build_delta(600);
    AveragedVfReport r = averaged_vf(d, 128, 16, 60, 200, 40, 0.37);
    CHECK(r.omega > 0.0);
    CHECK(r.vf > 0.0);
    CHECK(r.rel_gap <= 1e-6);
    CHECK(r.diagonal > 0.0);
  }
  SUBCASE("weight 26 at the full sample scale") {
    CuspForm f = build_form(26, 2200);
    AveragedVfReport r = averaged_vf(f, 1000, 32, 40, 1000, 100, 0.73);
    CHECK(r.rel_gap <= 1e-6);
    CHECK(r.normalized >= 0.0);
  }
}
