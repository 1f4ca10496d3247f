#include "cuspcorr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/correlation.hpp"
#include "cuspcorr/dirichlet.hpp"
#include "cuspcorr/expsum.hpp"
#include "cuspcorr/forms.hpp"
#include "cuspcorr/petersson.hpp"

namespace cuspcorr {

using ojson = nlohmann::ordered_json;

const std::vector<std::string> kExperimentNames = {
    "hecke-identities", "convolution-oracles", "vaughan",       "heathbrown",
    "arcs-sweep",       "vf-decay",            "circle-identity",
    "petersson-consistency", "moments-sweep",  "twisted-energy",
    "hardy-littlewood"};

i64 ExperimentConfig::resolved_H() const {
  i64 h;
  if (H > 0) {
    h = H;
  } else if (theta > 0.0) {
    if (theta >= 1.0) throw usage_error("theta must be in (0, 1)");
    h = (i64)std::ceil(std::pow((double)X, theta));
  } else {
    h = std::max<i64>(1, X / 16);
  }
  if (h < 1 || (X > 1 && h >= X))
    throw usage_error("resolved H must lie in [1, X-1]");
  return h;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment")
    experiment = value;
  else if (key == "weight")
    weight = std::stoi(value);
  else if (key == "X")
    X = std::stoll(value);
  else if (key == "H")
    H = std::stoll(value);
  else if (key == "theta")
    theta = std::stod(value);
  else if (key == "A")
    A = std::stod(value);
  else if (key == "eps")
    eps = std::stod(value);
  else if (key == "variant")
    variant = value;
  else if (key == "seed")
    seed = (u64)std::stoull(value);
  else if (key == "q")
    q = std::stoll(value);
  else if (key == "T")
    T = std::stod(value);
  else if (key == "M")
    M = std::stoll(value);
  else if (key == "cmax")
    cmax = std::stoll(value);
  else if (key == "pmax")
    pmax = std::stoll(value);
  else if (key == "threads")
    threads = std::stoi(value);
  else if (key == "out")
    out_dir = value;
  else
    throw usage_error("unknown config key: " + key);
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw usage_error("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw usage_error("config line " + std::to_string(lineno) + " is not key=value");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw usage_error("empty key in config line " + std::to_string(lineno));
    cfg.set(key, value);
  }
  return cfg;
}

int ExperimentReport::hard_pass() const {
  int n = 0;
  for (const auto& r : records) n += r.status == "pass";
  return n;
}
int ExperimentReport::hard_fail() const {
  int n = 0;
  for (const auto& r : records) n += r.status == "fail";
  return n;
}
int ExperimentReport::soft_count() const {
  int n = 0;
  for (const auto& r : records) n += r.status == "soft";
  return n;
}
int ExperimentReport::info_count() const {
  int n = 0;
  for (const auto& r : records) n += r.status == "info";
  return n;
}

std::string ExperimentReport::to_json() const {
  ojson j;
  j["experiment"] = config.experiment;
  ojson cfg;
  cfg["weight"] = config.weight;
  cfg["X"] = config.X;
  cfg["H"] = config.resolved_H();
  cfg["theta"] = config.theta;
  cfg["A"] = config.A;
  cfg["eps"] = config.eps;
  cfg["variant"] = config.variant;
  cfg["seed"] = config.seed;
  cfg["q"] = config.q;
  cfg["T"] = config.T;
  cfg["M"] = config.M;
  cfg["cmax"] = config.cmax;
  cfg["pmax"] = config.pmax;
  j["config"] = cfg;
  ojson recs = ojson::array();
  for (const auto& r : records) {
    ojson jr;
    jr["name"] = r.name;
    jr["module"] = r.module;
    jr["operation"] = r.operation;
    jr["params"] = r.params;
    jr["value"] = r.value;
    jr["envelope"] = r.envelope;
    jr["ratio"] = r.ratio;
    jr["status"] = r.status;
    recs.push_back(jr);
  }
  j["records"] = recs;
  ojson tabs = ojson::array();
  for (const auto& t : tables) {
    ojson jt;
    jt["weight"] = t.weight;
    jt["ncoeffs"] = t.ncoeffs;
    jt["source"] = t.source;
    tabs.push_back(jt);
  }
  j["coefficient_tables"] = tabs;
  ojson summary;
  summary["hard_pass"] = hard_pass();
  summary["hard_fail"] = hard_fail();
  summary["soft"] = soft_count();
  summary["info"] = info_count();
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

namespace {
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}
}  // namespace

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "name,module,operation,params,value,envelope,ratio,status\n";
  for (const auto& r : records) {
    os << csv_escape(r.name) << ',' << csv_escape(r.module) << ','
       << csv_escape(r.operation) << ',' << csv_escape(r.params) << ','
       << format_double(r.value) << ',' << format_double(r.envelope) << ','
       << format_double(r.ratio) << ',' << r.status << '\n';
  }
  return os.str();
}

namespace {

class Recorder {
 public:
  explicit Recorder(ExperimentReport& rep) : rep_(rep) {}

  void hard(const std::string& name, const std::string& module, const std::string& op,
            const std::string& params, double value, double envelope) {
    add(name, module, op, params, value, envelope,
        value <= envelope ? "pass" : "fail");
  }
  void soft(const std::string& name, const std::string& module, const std::string& op,
            const std::string& params, double value, double envelope) {
    add(name, module, op, params, value, envelope, "soft");
  }
  void info(const std::string& name, const std::string& module, const std::string& op,
            const std::string& params, double value) {
    add(name, module, op, params, value, 0.0, "info");
  }
  void fail(const std::string& name, const std::string& module, const std::string& op,
            const std::string& params, const std::string& why) {
    add(name + " (" + why + ")", module, op, params, 1.0, 0.0, "fail");
  }

 private:
  void add(const std::string& name, const std::string& module, const std::string& op,
           const std::string& params, double value, double envelope,
           const std::string& status) {
    auto t1 = std::chrono::steady_clock::now();
    CheckRecord r;
    r.name = name;
    r.module = module;
    r.operation = op;
    r.params = params;
    r.value = value;
    r.envelope = envelope;
    r.ratio = envelope != 0.0 ? value / envelope : 0.0;
    r.status = status;
    rep_.records.push_back(r);
    rep_.timings_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - mark_).count());
    mark_ = t1;
  }
  ExperimentReport& rep_;
  std::chrono::steady_clock::time_point mark_ = std::chrono::steady_clock::now();
};

std::string fmt_params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += " ";
    out += std::string(k) + "=" + v;
  }
  return out;
}
std::string s64(i64 v) { return std::to_string(v); }

void run_hecke_identities(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  i64 N = std::clamp<i64>(cfg.X, 100, 100'000);
  for (int k : kSupportedWeights) {
    if (cfg.weight != 12 && k != cfg.weight) continue;
    CuspForm f = build_form(k, N);
    rep.tables.push_back({k, N, "built"});
    i64 bad = hecke_violations(f, std::min<i64>(N, 10'000));
    rec.hard("hecke relation residual", "forms", "build_form",
             fmt_params({{"k", s64(k)}, {"N", s64(N)}}), (double)bad, 0.0);
  }
  bool ok = eisenstein_identity_ok((std::size_t)std::min<i64>(N, 1000));
  rec.hard("E4^3 - E6^2 = 1728 Delta", "forms", "build_form",
           fmt_params({{"trunc", s64(std::min<i64>(N, 1000))}}), ok ? 0.0 : 1.0, 0.0);
}

void run_convolution_oracles(const ExperimentConfig& cfg, ExperimentReport& rep,
                             Recorder& rec) {
  i64 N = std::clamp<i64>(cfg.X, 100, 10'000);
  CuspForm f = build_form(cfg.weight, N);
  rep.tables.push_back({cfg.weight, N, "built"});

  ArithTable lam_f = lambda_f_table(f, 1, N);
  ArithTable mu_f = mu_f_table(f, 1, N);
  ArithTable lam_log = lambda_log_table(f, 1, N);
  ConvolutionReport c1 = convolution_check(lam_f, mu_f, lam_log, 1e-9);
  rec.hard("Lambda_f = mu_f * (lambda_f log)", "arith", "convolution_check",
           fmt_params({{"N", s64(N)}, {"k", s64(cfg.weight)}}), c1.max_abs_error, 1e-9);

  i64 Nc = std::min<i64>(N, 1000);
  ArithTable vm = sieve_vonmangoldt(1, Nc);
  ArithTable mu = sieve_mobius(Nc);
  ArithTable lg = make_table(1, Nc, "log");
  for (i64 n = 1; n <= Nc; ++n) lg.ref(n) = std::log((double)n);
  ConvolutionReport c2 = convolution_check(vm, mu, lg, 1e-10);
  rec.hard("Lambda = mu * log", "arith", "convolution_check",
           fmt_params({{"N", s64(Nc)}}), c2.max_abs_error, 1e-10);

  // |Lambda_f(n)| <= 3 log n and |mu_f(n)| <= d_2(n)
  ArithTable d2 = sieve_divisor(2, 1, N);
  double worst_lf = 0.0, worst_mu = 0.0;
  for (i64 n = 2; n <= N; ++n) {
    worst_lf = std::max(worst_lf, std::abs(lam_f.at(n)) / (3.0 * std::log((double)n)));
    worst_mu = std::max(worst_mu, std::abs(mu_f.at(n)) / d2.at(n));
  }
  rec.hard("|Lambda_f(n)| <= 3 log n", "arith", "lambda_f_table",
           fmt_params({{"N", s64(N)}}), worst_lf, 1.0);
  rec.hard("|mu_f(n)| <= d_2(n)", "arith", "mu_f_table", fmt_params({{"N", s64(N)}}),
           worst_mu, 1.0);
}

void run_vaughan(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  const i64 xmax = std::clamp<i64>(cfg.X, 200, 10'000);
  const i64 N = 2 * xmax;
  CuspForm f = build_form(cfg.weight, N);
  rep.tables.push_back({cfg.weight, N, "built"});
  Xoshiro256 rng(cfg.seed);
  double worst = 0.0;
  i64 failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    i64 X = rng.next_range(100, xmax);
    i64 H = rng.next_range(1, X - 1);
    double alpha = rng.next_unit();
    i64 ub = (i64)std::sqrt((double)(X + H));
    i64 U = rng.next_range(2, std::max<i64>(2, ub));
    i64 V = rng.next_range(2, std::max<i64>(2, (X + H) / U));
    try {
      VaughanSums vs = vaughan_decompose(f, X, H, alpha, U, V);
      worst = std::max(worst, vs.residual / (1.0 + std::abs(vs.S)));
    } catch (const consistency_error&) {
      ++failures;
    }
  }
  rec.hard("vaughan identity residual (200 random tuples)", "expsum",
           "vaughan_decompose", fmt_params({{"xmax", s64(xmax)}, {"seed", s64((i64)cfg.seed)}}),
           failures > 0 ? 1.0 : worst, 1e-6);

  // the canonical U = V = ceil(X^{1/3}) choice at a fixed sample
  VaughanSums vs = vaughan_decompose(f, 1000, 100, 0.3, 10, 10);
  rec.hard("vaughan residual at U=V=ceil(X^{1/3})", "expsum", "vaughan_decompose",
           fmt_params({{"X", "1000"}, {"H", "100"}, {"alpha", "0.3"}}),
           vs.residual, 1e-8);
}

void run_heathbrown(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  CuspForm f = build_form(cfg.weight, 1000);
  rep.tables.push_back({cfg.weight, 1000, "built"});
  HeathBrownReport r1 = heath_brown_identity_check(f, 1, 500, 500);
  rec.hard("heath-brown L=1 reduces to convolution", "arith",
           "heath_brown_identity_check", fmt_params({{"L", "1"}, {"z", "500"}, {"N", "500"}}),
           r1.max_abs_deviation, 1e-9);
  HeathBrownReport r2 = heath_brown_identity_check(f, 2, 10, 200);
  rec.hard("heath-brown seed identity", "arith", "heath_brown_identity_check",
           fmt_params({{"L", "2"}, {"z", "10"}, {"N", "200"}}), r2.max_abs_deviation,
           1e-8);
}

void run_arcs_sweep(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  (void)rep;
  i64 X = std::clamp<i64>(cfg.X, 1000, 100'000);
  i64 H = (i64)std::ceil(std::pow((double)X, 0.75));
  ArcDissection t1 = build_arcs(X, H, cfg.A, cfg.eps, ArcVariant::theorem1);
  // Farey count: sum of phi(q) for q <= Q, plus the 0/1 endpoint.
  i64 qmax = (i64)std::floor(t1.Q);
  i64 expect = 1;
  for (i64 q = 1; q <= qmax; ++q) {
    i64 cnt = 0;
    for (i64 a = 1; a <= q; ++a)
      if (std::gcd(a, q) == 1) ++cnt;
    expect += cnt;
  }
  rec.hard("major arc count = totient sum + endpoint", "expsum", "build_arcs",
           fmt_params({{"X", s64(X)}, {"H", s64(H)}, {"variant", "t1"}}),
           (double)((i64)t1.majors.size() - expect), 0.0);
  rec.info("t1 major measure", "expsum", "build_arcs",
           fmt_params({{"Q", format_double(t1.Q)}, {"R", format_double(t1.R)}}),
           t1.major_measure);

  ArcDissection t2 = build_arcs(X, (i64)std::ceil(std::pow((double)X, 0.5)), 0.1, 0.05,
                                ArcVariant::theorem2);
  rec.info("t2 major measure", "expsum", "build_arcs",
           fmt_params({{"Q", format_double(t2.Q)}, {"R", format_double(t2.R)}}),
           t2.major_measure);

  Xoshiro256 rng(cfg.seed);
  i64 asym = 0;
  for (int i = 0; i < 100; ++i) {
    double alpha = rng.next_unit();
    if (classify_alpha(t2, alpha).major != classify_alpha(t2, 1.0 - alpha).major) ++asym;
  }
  rec.hard("classification symmetric under alpha -> 1-alpha", "expsum",
           "classify_alpha", fmt_params({{"samples", "100"}}), (double)asym, 0.0);

  double minor_measure = 1.0 - t2.major_measure;
  rec.info("t2 minor measure", "expsum", "classify_alpha", "", minor_measure);

  // Empirical arc-energy suprema: sup over an alpha sample of the energy of
  // S_{f,Lambda} over (arcs or their complement) within [a-1/2H, a+1/2H].
  {
    i64 Xe = std::min<i64>(X, 2000);
    i64 He = (i64)std::ceil(std::pow((double)Xe, 0.5 + cfg.eps + 0.01));
    ArcDissection arcs = build_arcs(Xe, He, 0.1, cfg.eps, ArcVariant::theorem2);
    CuspForm f = build_form(cfg.weight, 2 * Xe);
    rep.tables.push_back({cfg.weight, 2 * Xe, "built"});
    ArithTable w = lambda_vonmangoldt_table(f, Xe + 1, 2 * Xe);
    double l2 = 0.0;
    for (double v : w.values) l2 += v * v;

    ArcDissection complement = arcs;
    complement.merged.clear();
    double prev_end = 0.0;
    for (const auto& [lo_iv, hi_iv] : arcs.merged) {
      if (lo_iv > prev_end) complement.merged.emplace_back(prev_end, lo_iv);
      prev_end = std::max(prev_end, hi_iv);
    }
    if (prev_end < 1.0) complement.merged.emplace_back(prev_end, 1.0);

    double window = 1.0 / (2.0 * (double)He);
    double sup_major = 0.0, sup_minor = 0.0;
    for (int s = 0; s < 12; ++s) {
      double alpha = rng.next_unit();
      sup_major = std::max(sup_major, arc_energy(w, arcs, alpha, window));
      sup_minor = std::max(sup_minor, arc_energy(w, complement, alpha, window));
    }
    rec.info("sup of major-arc window energy / l2", "correlation", "arc_energy",
             fmt_params({{"X", s64(Xe)}, {"H", s64(He)}}), sup_major / l2);
    rec.info("sup of minor-arc window energy / l2", "correlation", "arc_energy",
             fmt_params({{"X", s64(Xe)}, {"H", s64(He)}}), sup_minor / l2);

    // Wilton-style ratio sweep: the partial eigenvalue sums against
    // sqrt(y) log y stay bounded while y doubles.
    double wilton_max = 0.0;
    for (int j = 2; j <= 11; ++j) {
      i64 y = (i64)1 << j;
      Xoshiro256 thetas(cfg.seed + 1);
      for (int s = 0; s < 50; ++s)
        wilton_max = std::max(wilton_max, wilton_sum(f, y, thetas.next_unit()).ratio);
    }
    rec.info("max wilton ratio over y = 4..2048, 50 angles", "expsum", "wilton_sum",
             fmt_params({{"seed", s64((i64)cfg.seed + 1)}}), wilton_max);
  }
}

void run_vf_decay(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  i64 xtop = 1 << 13;
  CuspForm f = build_form(cfg.weight, 2 * xtop);
  rep.tables.push_back({cfg.weight, 2 * xtop, "built"});
  double prev = 0.0;
  bool decreasing = true;
  for (int e = 10; e <= 13; ++e) {
    i64 X = (i64)1 << e;
    i64 H = (i64)std::ceil(std::pow((double)X, 0.8));
    ArithTable w = lambda_vonmangoldt_table(f, X + 1, 2 * X);
    CorrelationResult direct = autocorr_direct(w, std::min<i64>(H, 64), cfg.threads);
    CorrelationResult fft = autocorr_fft(w, std::min<i64>(H, 64));
    double rel = 0.0;
    for (i64 h = 1; h <= direct.H; ++h) {
      double denom = std::max(1.0, std::abs(direct.c(h)));
      rel = std::max(rel, std::abs(direct.c(h) - fft.c(h)) / denom);
    }
    rec.hard("direct vs fft autocorrelation", "correlation", "autocorr_fft",
             fmt_params({{"X", s64(X)}}), rel, 1e-6);

    CorrelationResult full = autocorr_fft(w, H);
    double smoothed = vf_smoothed(w, H);
    rec.hard("smoothed majorant dominates V_f", "correlation", "vf_smoothed",
             fmt_params({{"X", s64(X)}, {"H", s64(H)}}),
             full.vf - smoothed, 0.0);
    double normalized = full.vf / ((double)H * (double)X * (double)X);
    rec.info("V_f/(H X^2)", "correlation", "autocorr_fft",
             fmt_params({{"X", s64(X)}, {"H", s64(H)}}), normalized);
    if (e > 10 && normalized > prev) decreasing = false;
    prev = normalized;
  }
  rec.soft("V_f/(H X^2) decreasing across doubling X", "correlation", "autocorr_fft",
           fmt_params({{"X", "2^10..2^13"}}), decreasing ? 0.0 : 1.0, 0.0);
}

void run_circle_identity(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  i64 X = std::clamp<i64>(cfg.X, 64, 4096);
  i64 H = std::min<i64>(cfg.resolved_H(), X - 1);
  CuspForm f = build_form(cfg.weight, 2 * X);
  rep.tables.push_back({cfg.weight, 2 * X, "built"});
  ArithTable w = lambda_vonmangoldt_table(f, X + 1, 2 * X);
  CircleCheckReport r = circle_integral_check(w, H);
  rec.hard("circle-method identity max deviation", "correlation",
           "circle_integral_check", fmt_params({{"X", s64(X)}, {"H", s64(H)}}),
           r.max_rel_deviation, 1e-8);
  double h0_gap = std::abs(r.h0_integral - r.l2_norm_sq) / std::max(1.0, r.l2_norm_sq);
  rec.hard("h=0 row equals the l2 norm", "correlation", "circle_integral_check",
           fmt_params({{"X", s64(X)}}), h0_gap, 1e-10);
}

void run_petersson_consistency(const ExperimentConfig& cfg, ExperimentReport& rep,
                               Recorder& rec) {
  (void)rep;
  auto mat = petersson_matrix(12, 20, 1e-8);
  CuspForm delta = build_delta(32);
  double omega = mat[0][0].value;
  double worst = 0.0;
  for (i64 m = 1; m <= 20; ++m)
    for (i64 n = 1; n <= 20; ++n) {
      double lhs = mat[(std::size_t)(m - 1)][(std::size_t)(n - 1)].value / omega;
      worst = std::max(worst, std::abs(lhs - delta.lambda(m) * delta.lambda(n)));
    }
  rec.hard("rank-1 ratio identity (k=12, m,n <= 20)", "petersson", "petersson_delta",
           fmt_params({{"tail", "1e-8"}}), worst, 1e-6);

  double weil_worst = 0.0;
  for (i64 p : primes_upto(200))
    weil_worst = std::max(weil_worst,
                          std::abs(kloosterman(1, 1, p)) / (2.0 * std::sqrt((double)p)));
  rec.hard("weil bound |S(1,1;p)| <= 2 sqrt(p)", "petersson", "kloosterman",
           fmt_params({{"p", "<=200"}}), weil_worst, 1.0);

  double shape_max = 0.0;
  for (int k = 12; k <= 26; k += 2) {
    auto m50 = petersson_matrix(k, 50, 1e-8);
    for (i64 m = 1; m <= 50; ++m)
      for (i64 n = 1; n <= 50; ++n) {
        double err = std::abs(m50[(std::size_t)(m - 1)][(std::size_t)(n - 1)].value -
                              (m == n ? 1.0 : 0.0));
        double mn = (double)m * (double)n;
        double g = (double)std::gcd(m, n);
        double d2g = 0.0;
        for (i64 d = 1; d <= (i64)g; ++d)
          if ((i64)g % d == 0) d2g += 1.0;
        double shape = std::pow(mn, 0.25) * std::pow(std::log(3.0 * mn), 2.0) * d2g /
                       std::sqrt((double)k);
        shape_max = std::max(shape_max, err / shape);
      }
  }
  rec.soft("error-bound shape constant (m,n <= 50, k = 12..26)", "petersson",
           "petersson_delta", "", shape_max, 1.0);

  double w30 = harmonic_weight(12, 30), w60 = harmonic_weight(12, 60);
  rec.hard("harmonic weight truncation stability", "petersson", "harmonic_weight",
           fmt_params({{"cmax", "30 vs 60"}}), std::abs(w30 - w60), 1e-8);

  double cross = std::abs(petersson_delta(12, 4, 1, cfg.cmax > 0 ? cfg.cmax : 60).value -
                          w60 * delta.lambda(4));
  rec.hard("Delta_12(4,1) = omega lambda(4)", "petersson", "petersson_delta",
           fmt_params({{"cmax", s64(cfg.cmax > 0 ? cfg.cmax : 60)}}), cross, 1e-6);
}

void run_moments_sweep(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  CuspForm f = build_form(cfg.weight, 2048);
  rep.tables.push_back({cfg.weight, 2048, "built"});

  // closed-form oracle at q=1, M=1: |1 + a 2^{-it}|^4 with a = lambda(2)/sqrt(2)
  double a = f.lambda(2) / std::sqrt(2.0);
  double th = std::log(2.0);
  double T = cfg.T;
  auto anti = [&](double t) {
    return ((1.0 + a * a) * (1.0 + a * a) + 2.0 * a * a) * t +
           4.0 * a * (1.0 + a * a) * std::sin(th * t) / th +
           2.0 * a * a * std::sin(2.0 * th * t) / (2.0 * th);
  };
  double oracle = anti(T) - anti(T / 2.0);
  Moment4Report base = moment4(f, 1, T, 1);
  rec.hard("moment4 matches two-term closed form", "dirichlet", "moment4",
           fmt_params({{"q", "1"}, {"M", "1"}, {"T", format_double(T)}}),
           std::abs(base.value - oracle) / std::max(1.0, std::abs(oracle)), 1e-6);

  double rmin = 1e300, rmax = 0.0;
  for (i64 q : {3, 4, 5, 7, 8})
    for (double t : {50.0, 100.0})
      for (i64 m : {64, 128, 256, 512, 1024}) {
        Moment4Report r = moment4(f, q, t, m);
        if (r.value == 0.0) continue;
        rmin = std::min(rmin, r.normalized);
        rmax = std::max(rmax, r.normalized);
        rec.info("moment4 normalized", "dirichlet", "moment4",
                 fmt_params({{"q", s64(q)}, {"T", format_double(t)}, {"M", s64(m)}}),
                 r.normalized);
      }
  rec.soft("moment4 ratio spread (max/min)", "dirichlet", "moment4", "",
           rmax / rmin, 4.0);
}

void run_twisted_energy(const ExperimentConfig& cfg, ExperimentReport& rep, Recorder& rec) {
  i64 X = std::clamp<i64>(cfg.X, 200, 4000);
  i64 H = std::min<i64>(cfg.resolved_H(), X / 2);
  CuspForm f = build_form(cfg.weight, 2 * X + H);
  rep.tables.push_back({cfg.weight, 2 * X + H, "built"});
  for (i64 q : {1, 3, 5}) {
    TwistedEnergyReport r = twisted_window_energy(f, q, X, H);
    rec.info("twisted window energy / (H^2/(log X)^B)", "dirichlet",
             "twisted_window_energy",
             fmt_params({{"q", s64(q)}, {"X", s64(X)}, {"H", s64(H)}}), r.normalized);
  }

  // orthogonality consistency at q=5 on one window
  {
    i64 q = 5;
    CharacterTable table(q);
    ArithTable lam_f = lambda_f_table(f, X + 1, X + H);
    double lhs = 0.0;
    for (i64 idx = 0; idx < table.size(); ++idx) {
      KahanSumC wv;
      for (i64 n = X + 1; n <= X + H; ++n) wv.add(lam_f.at(n) * table.value(idx, n));
      lhs += std::norm(wv.value());
    }
    double rhs = 0.0;
    for (i64 r = 1; r < q; ++r) {
      KahanSum wr;
      for (i64 n = X + 1; n <= X + H; ++n)
        if (n % q == r) wr.add(lam_f.at(n));
      rhs += wr.value() * wr.value();
    }
    rhs *= (double)(q - 1);  // phi(5) = 4
    double gap = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
    rec.hard("character orthogonality energy identity (q=5)", "dirichlet",
             "twisted_window_energy", fmt_params({{"X", s64(X)}, {"H", s64(H)}}), gap,
             1e-10);
  }

  // principal q=1 equals the plain short-interval variance (brute force)
  {
    i64 Xs = std::min<i64>(X, 1000), Hs = std::min<i64>(H, 50);
    TwistedEnergyReport r = twisted_window_energy(f, 1, Xs, Hs);
    ArithTable lam_f = lambda_f_table(f, Xs + 1, 2 * Xs + Hs);
    KahanSum brute;
    for (i64 m = Xs; m <= 2 * Xs - 1; ++m) {
      KahanSum w;
      for (i64 n = m + 1; n <= m + Hs; ++n) w.add(lam_f.at_or_zero(n));
      brute.add(w.value() * w.value());
    }
    double expect = brute.value() / (double)Xs;
    rec.hard("q=1 energy equals brute-force window variance", "dirichlet",
             "twisted_window_energy", fmt_params({{"X", s64(Xs)}, {"H", s64(Hs)}}),
             std::abs(r.value - expect) / std::max(1.0, expect), 1e-10);
  }
}

void run_hardy_littlewood(const ExperimentConfig& cfg, ExperimentReport& rep,
                          Recorder& rec) {
  (void)rep;
  i64 X = std::clamp<i64>(cfg.X, 1000, 10'000'000);
  i64 H = std::min<i64>(cfg.resolved_H(), 64);
  auto rows = hardy_littlewood_compare(X, H, cfg.pmax);
  double odd_worst = 0.0, even_soft = 0.0;
  double odd_env = 10.0 * std::sqrt((double)X) * std::pow(std::log((double)X), 2.0);
  for (const auto& r : rows) {
    if (r.h % 2 == 1)
      odd_worst = std::max(odd_worst, std::abs(r.correlation));
    else
      even_soft = std::max(even_soft, std::abs(r.normalized));
    if (r.h <= 8)
      rec.info("HL correlation error / X^{0.6}", "correlation",
               "hardy_littlewood_compare", fmt_params({{"h", s64(r.h)}, {"X", s64(X)}}),
               r.normalized);
  }
  rec.hard("odd-shift correlation envelope", "correlation", "hardy_littlewood_compare",
           fmt_params({{"X", s64(X)}, {"H", s64(H)}}), odd_worst, odd_env);
  rec.soft("even-shift normalized error", "correlation", "hardy_littlewood_compare",
           fmt_params({{"X", s64(X)}, {"H", s64(H)}}), even_soft, 1.0);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport rep;
  rep.config = config;
  Recorder rec(rep);
  const std::string& e = config.experiment;
  if (e == "hecke-identities")
    run_hecke_identities(config, rep, rec);
  else if (e == "convolution-oracles")
    run_convolution_oracles(config, rep, rec);
  else if (e == "vaughan")
    run_vaughan(config, rep, rec);
  else if (e == "heathbrown")
    run_heathbrown(config, rep, rec);
  else if (e == "arcs-sweep")
    run_arcs_sweep(config, rep, rec);
  else if (e == "vf-decay")
    run_vf_decay(config, rep, rec);
  else if (e == "circle-identity")
    run_circle_identity(config, rep, rec);
  else if (e == "petersson-consistency")
    run_petersson_consistency(config, rep, rec);
  else if (e == "moments-sweep")
    run_moments_sweep(config, rep, rec);
  else if (e == "twisted-energy")
    run_twisted_energy(config, rep, rec);
  else if (e == "hardy-littlewood")
    run_hardy_littlewood(config, rep, rec);
  else
    throw usage_error("unknown experiment: " + e);
  return rep;
}

std::string write_report(const ExperimentReport& report) {
  namespace fs = std::filesystem;
  if (report.config.out_dir.empty()) throw usage_error("no output directory configured");
  fs::path base(report.config.out_dir);
  fs::create_directories(base);
  fs::path run_dir;
  for (int i = 1; i < 100000; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "-%05d", i);
    fs::path cand = base / (report.config.experiment + buf);
    if (!fs::exists(cand)) {
      run_dir = cand;
      break;
    }
  }
  if (run_dir.empty()) throw resource_error("run directory space exhausted");
  fs::create_directory(run_dir);
  {
    std::ofstream os(run_dir / "report.json", std::ios::binary);
    os << report.to_json();
  }
  {
    std::ofstream os(run_dir / "report.csv", std::ios::binary);
    os << report.to_csv();
  }
  {
    std::ofstream os(run_dir / "timing.txt");
    for (std::size_t i = 0; i < report.records.size(); ++i)
      os << report.records[i].name << "\t" << format_double(report.timings_ms[i])
         << " ms\n";
  }
  return run_dir.string();
}

}  // namespace cuspcorr
