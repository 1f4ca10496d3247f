#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cuspcorr {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using cplx = std::complex<double>;

// Error taxonomy shared by all modules.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_weight_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct integrity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_instability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct truncation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct consistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Compensated accumulator (Kahan-Babuska). Summation order fixed by the
// caller, so results do not depend on thread count.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class KahanSumC {
 public:
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_, im_;
};

// e(x) = exp(2 pi i x), with the argument reduced in extended precision.
cplx unit_phase(double x);
cplx unit_phase_scaled(i64 n, double alpha);  // e(n * alpha)

// Runs fn(i) for i in [0, n). Work is split into fixed-size blocks whose
// boundaries do not depend on the thread count; fn must only write to
// per-index slots, so the result is bit-identical for any `threads`.
void parallel_for(i64 n, int threads, const std::function<void(i64)>& fn);

// xoshiro256** with splitmix64 seeding. The exact generator contract is
// documented in the README so sweeps can be reproduced elsewhere.
class Xoshiro256 {
 public:
  explicit Xoshiro256(u64 seed);
  u64 next();
  double next_unit();               // uniform in [0,1)
  i64 next_range(i64 lo, i64 hi);   // uniform integer in [lo, hi]

 private:
  u64 s_[4];
};

std::string format_double(double v);

}  // namespace cuspcorr
