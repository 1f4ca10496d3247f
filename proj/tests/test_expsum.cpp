#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cuspcorr/expsum.hpp"

using namespace cuspcorr;

namespace {

CuspForm& delta_form() {
  static CuspForm d = build_delta(4096);
  return d;
}

}  // namespace

TEST_CASE("exp_sum basics") {
  ArithTable z = make_table(5, 8, "zero");
  CHECK(std::abs(exp_sum(z, 0.37)) == 0.0);

  CuspForm& d = delta_form();
  ArithTable w = lambda_vonmangoldt_table(d, 5, 8);

  SUBCASE("alpha = 0 gives the plain real sum") {
    cplx s = exp_sum(w, 0.0);
    double direct = 0.0;
    for (i64 n = 5; n <= 8; ++n) direct += w.at(n);
    CHECK(s.real() == doctest::Approx(direct).epsilon(1e-14));
    CHECK(s.imag() == 0.0);
  }
  SUBCASE("four-term alternating sum at alpha = 1/2") {
    cplx s = exp_sum(w, 0.5);
    cplx direct{0.0, 0.0};
    for (i64 n = 5; n <= 8; ++n) direct += w.at(n) * ((n % 2 == 0) ? 1.0 : -1.0);
    CHECK(std::abs(s - direct) <= 1e-12);
  }
  SUBCASE("conjugation symmetry") {
    ArithTable big = lambda_vonmangoldt_table(d, 1001, 2000);
    for (double alpha : {0.1, 0.217, 0.33333, 0.478, 0.9}) {
      cplx a = exp_sum(big, alpha), b = std::conj(exp_sum(big, 1.0 - alpha));
      CHECK(std::abs(a - b) <= 1e-11 * (1.0 + std::abs(a)));
    }
  }
  SUBCASE("triangle inequality") {
    ArithTable big = lambda_vonmangoldt_table(d, 1001, 2000);
    double l1 = 0.0;
    for (i64 n = big.lo; n <= big.hi; ++n) l1 += std::abs(big.at(n));
    for (double alpha : {0.05, 0.61, 0.99})
      CHECK(std::abs(exp_sum(big, alpha)) <= l1 * (1.0 + 1e-14));
  }
}

TEST_CASE("exp_sum_rational uses exact root phases") {
  CuspForm& d = delta_form();
  ArithTable w = lambda_vonmangoldt_table(d, 101, 200);
  cplx a = exp_sum_rational(w, 101, 200, 2, 7);
  cplx b = exp_sum(w, 2.0 / 7.0);
  CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
  CHECK_THROWS_AS(exp_sum_rational(w, 101, 200, 2, 4), parameter_error);
}

TEST_CASE("wilton sums") {
  CuspForm& d = delta_form();
  WiltonValue w1 = wilton_sum(d, 1, 0.0);
  CHECK(std::abs(w1.sum - cplx{1.0, 0.0}) <= 1e-12);
  CHECK(std::abs(wilton_sum(d, 1, 0.7).sum) == doctest::Approx(1.0).epsilon(1e-12));

  WiltonValue w2 = wilton_sum(d, 2, 0.0);
  CHECK(w2.sum.real() == doctest::Approx(1.0 + d.lambda(2)).epsilon(1e-12));
  CHECK(w2.sum.real() == doctest::Approx(0.469670).epsilon(1e-5));

  CHECK_THROWS_AS(wilton_sum(d, 0, 0.0), parameter_error);
  CHECK_THROWS_AS(wilton_sum(d, d.ncoeffs() + 1, 0.0), parameter_error);

  SUBCASE("ratio stays bounded while y doubles") {
    Xoshiro256 rng(11);
    double prev_max = 0.0;
    for (int j = 2; j <= 12; ++j) {
      i64 y = (i64)1 << j;
      double mx = 0.0;
      Xoshiro256 thetas(17);  // same angles at every scale
      for (int s = 0; s < 50; ++s) mx = std::max(mx, wilton_sum(d, y, thetas.next_unit()).ratio);
      if (j > 2) CHECK(mx <= 2.0 * prev_max + 1e-9);
      prev_max = mx;
      CHECK(mx < 10.0);
    }
    (void)rng;
  }
}

TEST_CASE("dirichlet rational approximation") {
  RationalApprox r = dirichlet_approx(1.0 / 3.0, 10.0);
  CHECK(r.a == 1);
  CHECK(r.q == 3);
  CHECK(r.err <= 1e-15);

  RationalApprox z = dirichlet_approx(0.0, 5.0);
  CHECK(z.a == 0);
  CHECK(z.q == 1);
  CHECK(z.err == 0.0);

  SUBCASE("sqrt(2)-1 at R=100 against exhaustive search") {
    double alpha = std::sqrt(2.0) - 1.0;
    RationalApprox got = dirichlet_approx(alpha, 100.0);
    CHECK(got.a == 29);
    CHECK(got.q == 70);
    CHECK(got.err <= 1.0 / ((double)got.q * 100.0));
    // exhaustive check of the convergent property: no fraction with a smaller
    // denominator approximates better in the |q alpha - a| metric
    double got_metric = std::abs((double)got.q * alpha - (double)got.a);
    for (i64 q = 1; q < got.q; ++q) {
      i64 a = (i64)std::llround(alpha * (double)q);
      CHECK(std::abs((double)q * alpha - (double)a) > got_metric);
    }
  }
  SUBCASE("dirichlet guarantee on random samples") {
    Xoshiro256 rng(5);
    for (int i = 0; i < 200; ++i) {
      double alpha = rng.next_unit();
      double R = 1.0 + 500.0 * rng.next_unit();
      RationalApprox g = dirichlet_approx(alpha, R);
      CHECK((double)g.q <= R);
      CHECK(g.err <= 1.0 / ((double)g.q * R) + 1e-15);
      CHECK(std::gcd(std::abs(g.a), g.q) <= 1);
    }
  }
}

TEST_CASE("arc dissection") {
  SUBCASE("degenerate Q keeps only the endpoints") {
    ArcDissection tiny = build_arcs(10000, 100, 0.05, 0.05, ArcVariant::theorem2, {-2.0});
    REQUIRE(tiny.majors.size() == 2);
    CHECK(tiny.majors[0].a == 0);
    CHECK(tiny.majors[0].q == 1);
    CHECK(tiny.majors[1].a == 1);
    CHECK(tiny.majors[1].q == 1);
  }
  SUBCASE("totient count and interval bookkeeping") {
    ArcDissection t1 = build_arcs(10000, 1000, 1.0, 0.05, ArcVariant::theorem1);
    i64 qmax = (i64)std::floor(t1.Q);
    i64 expect = 1;  // extra 0/1 endpoint
    for (i64 q = 1; q <= qmax; ++q)
      for (i64 a = 1; a <= q; ++a)
        if (std::gcd(a, q) == 1) ++expect;
    CHECK((i64)t1.majors.size() == expect);
    for (const auto& m : t1.majors) {
      CHECK(std::gcd(std::abs(m.a), m.q) <= 1);
      CHECK(m.q <= qmax);
    }
    double measure_minor = 1.0 - t1.major_measure;
    CHECK(measure_minor >= 0.0);
    CHECK(t1.major_measure <= 1.0 + 1e-12);
  }
  SUBCASE("admissible H window enforced") {
    CHECK_THROWS_AS(build_arcs(10000, 50, 1.0, 0.05, ArcVariant::theorem1),
                    parameter_error);
    CHECK_THROWS_AS(build_arcs(10000, 9999, 1.0, 0.05, ArcVariant::theorem1),
                    parameter_error);
  }
}

TEST_CASE("classification against the arc union") {
  ArcDissection t2 = build_arcs(10000, 100, 0.1, 0.05, ArcVariant::theorem2);

  SUBCASE("centers are always major") {
    for (const auto& m : t2.majors) {
      Classification c = classify_alpha(t2, std::min(1.0, std::max(0.0, m.center)));
      CHECK(c.major);
    }
  }
  SUBCASE("gap midpoints are minor") {
    int found = 0;
    for (std::size_t i = 0; i + 1 < t2.merged.size(); ++i) {
      double gap_lo = t2.merged[i].second, gap_hi = t2.merged[i + 1].first;
      if (gap_hi - gap_lo < 1e-9) continue;
      Classification c = classify_alpha(t2, 0.5 * (gap_lo + gap_hi));
      CHECK_FALSE(c.major);
      ++found;
    }
    CHECK(found > 0);
  }
  SUBCASE("stable under alpha -> 1 - alpha") {
    Xoshiro256 rng(3);
    for (int i = 0; i < 100; ++i) {
      double alpha = rng.next_unit();
      CHECK(classify_alpha(t2, alpha).major == classify_alpha(t2, 1.0 - alpha).major);
    }
  }
  SUBCASE("witness comes from the dissection R") {
    Classification c = classify_alpha(t2, 0.3183);
    CHECK((double)c.witness.q <= t2.R);
    CHECK(c.witness.err <= 1.0 / ((double)c.witness.q * t2.R) + 1e-15);
  }
}

TEST_CASE("gallagher ratio") {
  SUBCASE("degenerate zero input") {
    ArithTable z = make_table(101, 200, "zero");
    GallagherReport r = gallagher_ratio(z, 0, 1, 10);
    CHECK(r.degenerate);
    CHECK(r.ratio == 0.0);
  }
  SUBCASE("single-coefficient closed form gives ratio 2") {
    ArithTable t = make_table(201, 400, "single");
    t.ref(300) = 2.0;
    GallagherReport r = gallagher_ratio(t, 0, 1, 25);
    CHECK(r.rhs == doctest::Approx(4.0 / 25.0).epsilon(1e-12));  // c^2 / Y
    CHECK(r.lhs == doctest::Approx(2.0 * 4.0 / 25.0).epsilon(1e-2));
    CHECK(r.ratio == doctest::Approx(2.0).epsilon(1e-2));
  }
  SUBCASE("calibrated envelope for the eigenvalue-weighted table") {
    CuspForm& d = delta_form();
    ArithTable w = lambda_vonmangoldt_table(d, 1001, 2000);
    GallagherReport r = gallagher_ratio(w, 0, 1, 50);
    CHECK(r.ratio <= 70.0);
    GallagherReport r2 = gallagher_ratio(w, 1, 3, 50);
    CHECK(r2.ratio <= 70.0);
  }
}

TEST_CASE("vaughan decomposition") {
  CuspForm& d = delta_form();

  SUBCASE("empty window") {
    VaughanSums v = vaughan_decompose(d, 1000, 0, 0.37, 10, 10);
    CHECK(std::abs(v.S) == 0.0);
    CHECK(std::abs(v.S1) == 0.0);
    CHECK(std::abs(v.S2) == 0.0);
    CHECK(std::abs(v.S3) == 0.0);
    CHECK(std::abs(v.S4) == 0.0);
  }
  SUBCASE("cube-root parameter choice") {
    VaughanSums v = vaughan_decompose(d, 1000, 100, 0.3, 10, 10);
    CHECK(v.residual <= 1e-8);
  }
  SUBCASE("alpha = 0 keeps everything real") {
    VaughanSums v = vaughan_decompose(d, 500, 80, 0.0, 8, 8);
    double scale = 1.0 + std::abs(v.S);
    CHECK(std::abs(v.S.imag()) <= 1e-12 * scale);
    CHECK(std::abs(v.S2.imag()) <= 1e-12 * scale);
    CHECK(std::abs(v.S4.imag()) <= 1e-12 * scale);
  }
  SUBCASE("randomized residual sweep") {
    Xoshiro256 rng(21);
    for (int i = 0; i < 40; ++i) {
      i64 X = rng.next_range(100, 1800);
      i64 H = rng.next_range(1, X - 1);
      double alpha = rng.next_unit();
      i64 U = rng.next_range(2, std::max<i64>(2, (i64)std::sqrt((double)X)));
      i64 V = rng.next_range(2, std::max<i64>(2, (X + H) / U));
      VaughanSums v = vaughan_decompose(d, X, H, alpha, U, V);
      CHECK(v.residual <= 1e-6 * (1.0 + std::abs(v.S)));
    }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(vaughan_decompose(d, 100, 10, 0.5, 1, 10), parameter_error);
    CHECK_THROWS_AS(vaughan_decompose(d, 100, 10, 0.5, 50, 50), parameter_error);
    CHECK_THROWS_AS(vaughan_decompose(d, 4000, 200, 0.5, 10, 10), parameter_error);
  }
}

TEST_CASE("pointwise bound ratio") {
  CuspForm& d = delta_form();

  SUBCASE("q=1 equals the plain windowed sum") {
    i64 x = 1000, H = 178;  // ceil(1000^0.75) = 178
    PointwiseBoundReport r = pointwise_bound_ratio(d, x, H, 0, 1);
    ArithTable w = lambda_vonmangoldt_table(d, x, x + H);
    double direct = 0.0;
    for (i64 n = x; n <= x + H; ++n) direct += w.at(n);
    CHECK(r.sum_abs == doctest::Approx(std::abs(direct)).epsilon(1e-10));
    CHECK(r.ratio == r.sum_abs / r.envelope);
  }
  SUBCASE("window precondition") {
    CHECK_THROWS_AS(pointwise_bound_ratio(d, 1000, 50, 1, 3), parameter_error);
    CHECK_THROWS_AS(pointwise_bound_ratio(d, 1000, 1001, 1, 3), parameter_error);
  }
  SUBCASE("ratio is finite and small at a rational phase") {
    PointwiseBoundReport r = pointwise_bound_ratio(d, 1000, 200, 1, 3);
    CHECK(r.ratio >= 0.0);
    CHECK(r.ratio < 1.0);
  }
}
