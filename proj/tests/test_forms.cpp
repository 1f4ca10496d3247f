#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cuspcorr/forms.hpp"
#include "cuspcorr/series.hpp"

using namespace cuspcorr;

namespace {

// Independent oracle: naive O(N^2) expansion of q * prod_{n<=N} (1-q^n)^24
// with plain 64-bit arithmetic (valid for small N only).
std::vector<long long> naive_tau(int N) {
  std::vector<long long> poly(N, 0);
  poly[0] = 1;
  for (int n = 1; n < N; ++n) {
    for (int rep = 0; rep < 24; ++rep) {
      // multiply by (1 - q^n)
      for (int i = N - 1; i >= n; --i) poly[i] -= poly[i - n];
    }
  }
  return poly;  // poly[i] = tau(i+1)
}

}  // namespace

TEST_CASE("delta coefficients match the naive expansion oracle") {
  const int N = 30;
  std::vector<long long> oracle = naive_tau(N);
  CuspForm d = build_delta(N);
  for (int n = 1; n <= N; ++n) CHECK(d.a(n) == mpz_class((long)oracle[n - 1]));
}

TEST_CASE("delta first coefficients") {
  CuspForm d = build_delta(6);
  const long long expect[] = {1, -24, 252, -1472, 4830, -6048};
  for (int n = 1; n <= 6; ++n) CHECK(d.a(n) == mpz_class((long)expect[n - 1]));
  CHECK(d.a(2) * d.a(3) == d.a(6));
}

TEST_CASE("delta N=1 is the bare normalization") {
  CuspForm d = build_delta(1);
  CHECK(d.ncoeffs() == 1);
  CHECK(d.a(1) == 1);
  CHECK(d.lambda(1) == 1.0);
}

TEST_CASE("build_form weights") {
  CuspForm d = build_delta(50);
  CuspForm f12 = build_form(12, 50);
  for (int n = 1; n <= 50; ++n) CHECK(f12.a(n) == d.a(n));

  CuspForm f16 = build_form(16, 4);
  CHECK(f16.a(1) == 1);
  CHECK(f16.a(2) == 216);  // -24 + 240

  CHECK_THROWS_AS(build_form(14, 10), unsupported_weight_error);
  CHECK_THROWS_AS(build_form(24, 10), unsupported_weight_error);
  CHECK_THROWS_AS(build_form(13, 10), unsupported_weight_error);
  CHECK_THROWS_AS(build_delta(0), parameter_error);
}

TEST_CASE("hecke relation holds exactly for every supported weight") {
  for (int k : kSupportedWeights) {
    CuspForm f = build_form(k, 2000);
    CHECK(hecke_violations(f, 2000) == 0);
  }
}

TEST_CASE("eisenstein identity E4^3 - E6^2 = 1728 Delta") {
  CHECK(eisenstein_identity_ok(500));
}

TEST_CASE("deligne bound holds exactly up to 2e4 at weight 12") {
  CuspForm d = build_delta(20000);
  CHECK(deligne_violation(d, 20000) == 0);
}

TEST_CASE("normalized eigenvalues") {
  CuspForm d = build_delta(16);
  CHECK(d.lambda(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.lambda(2) == doctest::Approx(-0.530330085889911).epsilon(1e-12));
  // 4^{11/2} = 2^11, so lambda(4) = -1472/2048 exactly
  CHECK(d.lambda(4) == -0.71875);
  CHECK(lambda_at(d, 2) == d.lambda(2));
  CHECK_THROWS_AS(d.lambda(17), parameter_error);
  CHECK_THROWS_AS(d.lambda(0), parameter_error);
}

TEST_CASE("lambda satisfies the p-power recurrence") {
  CuspForm d = build_delta(3000);
  for (i64 p : {2, 3, 5, 7, 11, 13}) {
    double lam = d.lambda(p);
    i64 pj = p;
    double prev = 1.0, cur = lam;
    while (pj * p <= d.ncoeffs()) {
      pj *= p;
      double nxt = lam * cur - prev;
      prev = cur;
      cur = nxt;
      CHECK(d.lambda(pj) == doctest::Approx(cur).epsilon(1e-10));
    }
  }
}

TEST_CASE("coefficient cache round-trips bit-identically") {
  CuspForm f = build_form(16, 300);
  std::string path = (std::filesystem::temp_directory_path() / "cusp_test.cache").string();
  write_cache(f, path);

  CacheInfo info = cache_info(path);
  CHECK(info.version == 1);
  CHECK(info.weight == 16);
  CHECK(info.ncoeffs == 300);

  CuspForm g = read_cache(path);
  CHECK(g.weight() == 16);
  REQUIRE(g.ncoeffs() == 300);
  for (i64 n = 1; n <= 300; ++n) CHECK(f.a(n) == g.a(n));
  CHECK(cache_verify_sample(g, 99) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("cache integrity failures carry byte offsets") {
  CuspForm f = build_delta(40);
  auto tmp = std::filesystem::temp_directory_path();
  std::string path = (tmp / "cusp_corrupt.cache").string();
  write_cache(f, path);

  SUBCASE("truncated file") {
    auto sz = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, sz - 3);
    CHECK_THROWS_AS(read_cache(path), integrity_error);
    try {
      read_cache(path);
    } catch (const integrity_error& e) {
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    std::fstream fs(path, std::ios::in | std::ios::out | std::ios::binary);
    fs.write("JUNK", 4);
    fs.close();
    CHECK_THROWS_AS(cache_info(path), integrity_error);
  }
  std::filesystem::remove(path);
}

TEST_CASE("kronecker series multiplication agrees with schoolbook") {
  ZSeries a = {mpz_class(3), mpz_class(-7), mpz_class(0), mpz_class(12)};
  ZSeries b = {mpz_class(-2), mpz_class(5), mpz_class(9)};
  ZSeries got = series_mul(a, b, 6);
  ZSeries want(6, mpz_class(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i + j < 6) want[i + j] += a[i] * b[j];
  for (std::size_t i = 0; i < 6; ++i) CHECK(got[i] == want[i]);

  ZSeries sq = series_sqr(a, 7);
  ZSeries want2(7, mpz_class(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i + j < 7) want2[i + j] += a[i] * a[j];
  for (std::size_t i = 0; i < 7; ++i) CHECK(sq[i] == want2[i]);
}
