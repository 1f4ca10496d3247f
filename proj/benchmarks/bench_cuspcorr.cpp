#include <benchmark/benchmark.h>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/correlation.hpp"
#include "cuspcorr/dirichlet.hpp"
#include "cuspcorr/forms.hpp"
#include "cuspcorr/petersson.hpp"

using namespace cuspcorr;

static void BM_BuildDelta(benchmark::State& state) {
  for (auto _ : state) {
    CuspForm d = build_delta(state.range(0));
    benchmark::DoNotOptimize(d.a(state.range(0)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildDelta)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_SieveVonMangoldt(benchmark::State& state) {
  for (auto _ : state) {
    ArithTable t = sieve_vonmangoldt(1, state.range(0));
    benchmark::DoNotOptimize(t.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SieveVonMangoldt)->RangeMultiplier(8)->Range(1 << 14, 1 << 23)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_AutocorrDirect(benchmark::State& state) {
  i64 X = state.range(0);
  ArithTable t = make_table(X + 1, 2 * X, "bench");
  Xoshiro256 rng(1);
  for (auto& v : t.values) v = 2.0 * rng.next_unit() - 1.0;
  for (auto _ : state) {
    CorrelationResult r = autocorr_direct(t, X / 8);
    benchmark::DoNotOptimize(r.vf);
  }
}
BENCHMARK(BM_AutocorrDirect)->RangeMultiplier(2)->Range(1 << 9, 1 << 12)
    ->Unit(benchmark::kMillisecond);

static void BM_AutocorrFFT(benchmark::State& state) {
  i64 X = state.range(0);
  ArithTable t = make_table(X + 1, 2 * X, "bench");
  Xoshiro256 rng(1);
  for (auto& v : t.values) v = 2.0 * rng.next_unit() - 1.0;
  for (auto _ : state) {
    CorrelationResult r = autocorr_fft(t, X / 8);
    benchmark::DoNotOptimize(r.vf);
  }
}
BENCHMARK(BM_AutocorrFFT)->RangeMultiplier(2)->Range(1 << 9, 1 << 15)
    ->Unit(benchmark::kMillisecond);

static void BM_KloostermanRow(benchmark::State& state) {
  i64 cmax = state.range(0);
  for (auto _ : state) {
    double acc = 0.0;
    for (i64 c = 1; c <= cmax; ++c) acc += kloosterman(2, 3, c);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_KloostermanRow)->RangeMultiplier(2)->Range(64, 512)
    ->Unit(benchmark::kMillisecond);

static void BM_PeterssonMatrix(benchmark::State& state) {
  for (auto _ : state) {
    auto mat = petersson_matrix(12, state.range(0), 1e-8);
    benchmark::DoNotOptimize(mat[0][0].value);
  }
}
BENCHMARK(BM_PeterssonMatrix)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CharacterTable(benchmark::State& state) {
  for (auto _ : state) {
    CharacterTable t(state.range(0));
    benchmark::DoNotOptimize(t.size());
  }
}
BENCHMARK(BM_CharacterTable)->Arg(97)->Arg(480)->Arg(5040)->Unit(benchmark::kMillisecond);

static void BM_Moment4(benchmark::State& state) {
  static CuspForm d = build_delta(4096);
  for (auto _ : state) {
    Moment4Report r = moment4(d, 5, 50.0, state.range(0));
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_Moment4)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
