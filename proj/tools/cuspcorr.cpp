#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "cuspcorr/arith.hpp"
#include "cuspcorr/correlation.hpp"
#include "cuspcorr/dirichlet.hpp"
#include "cuspcorr/experiment.hpp"
#include "cuspcorr/expsum.hpp"
#include "cuspcorr/forms.hpp"
#include "cuspcorr/petersson.hpp"

namespace cc = cuspcorr;

namespace {

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw cc::usage_error("cannot open output file: " + path);
  return file;
}

int cmd_forms(int weight, long long ncoeffs, const std::string& cache_path) {
  cc::CuspForm form = cc::build_form(weight, ncoeffs);
  if (!cache_path.empty()) {
    cc::write_cache(form, cache_path);
    std::printf("cached weight-%d form with %lld coefficients to %s\n", weight,
                (long long)form.ncoeffs(), cache_path.c_str());
  } else {
    for (cc::i64 n = 1; n <= std::min<cc::i64>(form.ncoeffs(), 10); ++n)
      std::printf("a(%lld) = %s\n", (long long)n, form.a(n).get_str().c_str());
  }
  return 0;
}

int cmd_arith(const std::string& fn, long long lo, long long hi, int weight, int m,
              const std::string& out) {
  cc::ArithTable t;
  if (fn == "vonmangoldt") {
    t = cc::sieve_vonmangoldt(lo, hi);
  } else if (fn == "lambdaf") {
    cc::CuspForm form = cc::build_form(weight, hi);
    t = cc::lambda_f_table(form, lo, hi);
  } else if (fn == "muf") {
    cc::CuspForm form = cc::build_form(weight, hi);
    t = cc::mu_f_table(form, lo, hi);
  } else if (fn == "divisor") {
    t = cc::sieve_divisor(m, lo, hi);
  } else {
    throw cc::usage_error("unknown arith function: " + fn);
  }
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "n,value\n";
  for (cc::i64 n = t.lo; n <= t.hi; ++n)
    os << n << ',' << cc::format_double(t.at(n)) << '\n';
  return 0;
}

int cmd_arcs(long long X, long long H, double A, double eps, const std::string& variant,
             double classify, bool has_classify) {
  cc::ArcVariant v =
      variant == "t2" ? cc::ArcVariant::theorem2 : cc::ArcVariant::theorem1;
  cc::ArcDissection arcs = cc::build_arcs(X, H, A, eps, v);
  std::printf("variant=%s Q=%.6g R=%.6g fractions=%zu measure=%.9f\n",
              variant.c_str(), arcs.Q, arcs.R, arcs.majors.size(), arcs.major_measure);
  if (has_classify) {
    cc::Classification c = cc::classify_alpha(arcs, classify);
    std::printf("alpha=%.12g -> %s witness=%lld/%lld err=%.3e\n", classify,
                c.major ? "major" : "minor", (long long)c.witness.a,
                (long long)c.witness.q, c.witness.err);
  }
  return 0;
}

int cmd_expsum(double alpha, long long X, int weight, const std::string& out) {
  cc::CuspForm form = cc::build_form(weight, 2 * X);
  cc::ArithTable w = cc::lambda_vonmangoldt_table(form, X + 1, 2 * X);
  cc::cplx s = cc::exp_sum(w, alpha);
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "alpha,re,im,abs\n";
  os << cc::format_double(alpha) << ',' << cc::format_double(s.real()) << ','
     << cc::format_double(s.imag()) << ',' << cc::format_double(std::abs(s)) << '\n';
  return 0;
}

int cmd_corr(long long X, long long H, int weight, const std::string& method,
             const std::string& out, int threads) {
  cc::CuspForm form = cc::build_form(weight, 2 * X);
  cc::ArithTable w = cc::lambda_vonmangoldt_table(form, X + 1, 2 * X);
  std::optional<cc::CorrelationResult> direct, fft;
  if (method == "direct" || method == "both")
    direct = cc::autocorr_direct(w, H, threads);
  if (method == "fft" || method == "both") fft = cc::autocorr_fft(w, H);
  const cc::CorrelationResult& main = direct ? *direct : *fft;

  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "h,c_h,abs2\n";
  for (cc::i64 h = 1; h <= H; ++h)
    os << h << ',' << cc::format_double(main.c(h)) << ','
       << cc::format_double(main.c(h) * main.c(h)) << '\n';

  double smoothed = cc::vf_smoothed(w, H);
  double delta = 0.0;
  if (direct && fft) {
    for (cc::i64 h = 1; h <= H; ++h)
      delta = std::max(delta, std::abs(direct->c(h) - fft->c(h)) /
                                  std::max(1.0, std::abs(direct->c(h))));
  }
  std::fprintf(stderr,
               "{\"X\":%lld,\"H\":%lld,\"vf\":%s,\"vf_smoothed\":%s,"
               "\"method_delta\":%s}\n",
               (long long)X, (long long)H, cc::format_double(main.vf).c_str(),
               cc::format_double(smoothed).c_str(), cc::format_double(delta).c_str());
  return 0;
}

int cmd_petersson(int k, long long m, long long n, long long cmax) {
  cc::PeterssonValue v = cc::petersson_delta(k, m, n, cmax);
  std::printf(
      "{\"k\":%d,\"m\":%lld,\"n\":%lld,\"cmax\":%lld,\"value\":%s,"
      "\"tail_bound\":%s}\n",
      k, (long long)m, (long long)n, (long long)cmax,
      cc::format_double(v.value).c_str(), cc::format_double(v.tail_bound).c_str());
  return 0;
}

int cmd_avgvf(int k, long long X, long long H, long long cmax, unsigned long long seed) {
  cc::CuspForm form = cc::build_form(k, 2 * X);
  cc::Xoshiro256 rng(seed);
  double alpha = rng.next_unit();
  cc::i64 sx = std::max<cc::i64>(64, X / 4), sy = std::min<cc::i64>(60, sx / 2);
  cc::AveragedVfReport r = cc::averaged_vf(form, X, H, cmax, sx, sy, alpha);
  std::printf(
      "{\"k\":%d,\"X\":%lld,\"H\":%lld,\"omega\":%s,\"vf\":%s,"
      "\"weighted_vf\":%s,\"normalized\":%s,\"direct\":%s,\"diagonal\":%s,"
      "\"expansion\":%s,\"rel_gap\":%s}\n",
      k, (long long)X, (long long)H, cc::format_double(r.omega).c_str(),
      cc::format_double(r.vf).c_str(), cc::format_double(r.weighted_vf).c_str(),
      cc::format_double(r.normalized).c_str(), cc::format_double(r.direct).c_str(),
      cc::format_double(r.diagonal).c_str(), cc::format_double(r.expansion).c_str(),
      cc::format_double(r.rel_gap).c_str());
  return 0;
}

int cmd_moments(long long q, double T, long long M, int weight, const std::string& out) {
  cc::CuspForm form = cc::build_form(weight, 2 * M);
  cc::Moment4Report r = cc::moment4(form, q, T, M);
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "q,T,M,value,ratio\n";
  os << q << ',' << cc::format_double(T) << ',' << M << ','
     << cc::format_double(r.value) << ',' << cc::format_double(r.normalized) << '\n';
  return 0;
}

int cmd_twisted_energy(long long q, long long X, long long H, int weight) {
  cc::CuspForm form = cc::build_form(weight, 2 * X + H);
  cc::TwistedEnergyReport r = cc::twisted_window_energy(form, q, X, H);
  std::printf("{\"q\":%lld,\"X\":%lld,\"H\":%lld,\"value\":%s,\"normalized\":%s}\n",
              (long long)q, (long long)X, (long long)H,
              cc::format_double(r.value).c_str(),
              cc::format_double(r.normalized).c_str());
  return 0;
}

int cmd_run(cc::ExperimentConfig cfg) {
  cc::ExperimentReport rep = cc::run_experiment(cfg);
  if (!cfg.out_dir.empty()) {
    std::string dir = cc::write_report(rep);
    std::fprintf(stderr, "report written to %s\n", dir.c_str());
  } else {
    std::fputs(rep.to_json().c_str(), stdout);
  }
  for (const auto& r : rep.records)
    if (r.status == "fail")
      std::fprintf(stderr, "FAIL: %s (value=%g envelope=%g)\n", r.name.c_str(), r.value,
                   r.envelope);
  return rep.hard_fail() == 0 ? 0 : 1;
}

int cmd_cache(const std::string& sub, int weight, long long ncoeffs,
              const std::string& path, unsigned long long seed) {
  if (sub == "build") {
    cc::CuspForm form = cc::build_form(weight, ncoeffs);
    cc::write_cache(form, path);
    std::printf("built cache: weight=%d N=%lld path=%s\n", weight,
                (long long)form.ncoeffs(), path.c_str());
    return 0;
  }
  if (sub == "info") {
    cc::CacheInfo info = cc::cache_info(path);
    std::printf("magic=CUSP version=%d weight=%d N=%llu\n", info.version, info.weight,
                (unsigned long long)info.ncoeffs);
    return 0;
  }
  if (sub == "verify") {
    cc::CuspForm form = cc::read_cache(path);
    cc::i64 bad = cc::cache_verify_sample(form, seed);
    std::printf("verified %s: weight=%d N=%lld mismatches=%lld\n", path.c_str(),
                form.weight(), (long long)form.ncoeffs(), (long long)bad);
    return bad == 0 ? 0 : 1;
  }
  throw cc::usage_error("unknown cache subcommand: " + sub);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cuspcorr: correlations of Hecke eigenvalues against the von Mangoldt weight"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 1;
  unsigned long long seed = 1;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out", out_dir, "output directory for reports");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads for parallel sections");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized sweeps");

  auto* sc_forms = app.add_subcommand("forms", "build a coefficient table");
  int weight = 12;
  long long ncoeffs = 1000;
  std::string cache_path;
  sc_forms->add_option("--weight", weight);
  sc_forms->add_option("--ncoeffs", ncoeffs);
  sc_forms->add_option("--cache", cache_path);

  auto* sc_arith = app.add_subcommand("arith", "tabulate an arithmetic function as CSV");
  std::string fn = "vonmangoldt", arith_out;
  long long lo = 1, hi = 100;
  int dm = 2;
  sc_arith->add_option("--fn", fn, "vonmangoldt|lambdaf|muf|divisor");
  sc_arith->add_option("--lo", lo);
  sc_arith->add_option("--hi", hi);
  sc_arith->add_option("--weight", weight);
  sc_arith->add_option("--m", dm, "order of the divisor function");
  sc_arith->add_option("--csv", arith_out, "output file (default stdout)");

  auto* sc_arcs = app.add_subcommand("arcs", "major/minor arc dissection");
  long long aX = 10000, aH = 1000;
  double A = 1.0, eps = 0.05, classify = 0.0;
  std::string variant = "t1";
  sc_arcs->add_option("--X", aX);
  sc_arcs->add_option("--H", aH);
  sc_arcs->add_option("--A", A);
  sc_arcs->add_option("--eps", eps);
  sc_arcs->add_option("--variant", variant, "t1|t2");
  auto* copt = sc_arcs->add_option("--classify", classify, "classify this alpha");

  auto* sc_expsum = app.add_subcommand("expsum", "exponential sum S_{f,Lambda}(alpha)");
  double alpha = 0.0;
  long long eX = 1000;
  std::string expsum_out;
  sc_expsum->add_option("--alpha", alpha);
  sc_expsum->add_option("--X", eX);
  sc_expsum->add_option("--weight", weight);
  sc_expsum->add_option("--csv", expsum_out);

  auto* sc_corr = app.add_subcommand("corr", "shift correlations and V_f(X;H)");
  long long cX = 1000, cH = 100;
  std::string method = "both", corr_out;
  sc_corr->add_option("--X", cX);
  sc_corr->add_option("--H", cH);
  sc_corr->add_option("--weight", weight);
  sc_corr->add_option("--method", method, "direct|fft|both");
  sc_corr->add_option("--out", corr_out, "CSV path (default stdout)");

  auto* sc_pet = app.add_subcommand("petersson", "Petersson average Delta_k(m,n)");
  int pk = 12;
  long long pm = 1, pn = 1, cmax = 60;
  sc_pet->add_option("--k", pk);
  sc_pet->add_option("--m", pm);
  sc_pet->add_option("--n", pn);
  sc_pet->add_option("--cmax", cmax);

  auto* sc_avgvf = app.add_subcommand("avgvf", "harmonically weighted V_f");
  int ak = 12;
  long long avX = 512, avH = 32, acmax = 60;
  sc_avgvf->add_option("--k", ak);
  sc_avgvf->add_option("--X", avX);
  sc_avgvf->add_option("--H", avH);
  sc_avgvf->add_option("--cmax", acmax);

  auto* sc_moments = app.add_subcommand("moments", "fourth moment of twisted polynomials");
  long long mq = 1, mM = 64;
  double mT = 50.0;
  std::string moments_out;
  sc_moments->add_option("--q", mq);
  sc_moments->add_option("--T", mT);
  sc_moments->add_option("--M", mM);
  sc_moments->add_option("--weight", weight);
  sc_moments->add_option("--csv", moments_out);

  auto* sc_te = app.add_subcommand("twisted-energy", "short-interval twisted energy");
  long long tq = 1, tX = 1000, tH = 50;
  sc_te->add_option("--q", tq);
  sc_te->add_option("--X", tX);
  sc_te->add_option("--H", tH);
  sc_te->add_option("--weight", weight);

  auto* sc_run = app.add_subcommand("run", "run a named experiment");
  std::string experiment;
  sc_run->add_option("--experiment", experiment,
                     "hecke-identities|convolution-oracles|vaughan|heathbrown|"
                     "arcs-sweep|vf-decay|circle-identity|petersson-consistency|"
                     "moments-sweep|twisted-energy|hardy-littlewood");
  long long rX = -1, rH = -1, rq = -1, rM = -1, rcmax = -1, rpmax = -1;
  double rA = -1.0, reps = -1.0, rT = -1.0, rtheta = -1.0;
  std::string rvariant;
  int rweight = -1;
  sc_run->add_option("--X", rX);
  sc_run->add_option("--H", rH);
  sc_run->add_option("--theta", rtheta);
  sc_run->add_option("--A", rA);
  sc_run->add_option("--eps", reps);
  sc_run->add_option("--variant", rvariant);
  sc_run->add_option("--weight", rweight);
  sc_run->add_option("--q", rq);
  sc_run->add_option("--T", rT);
  sc_run->add_option("--M", rM);
  sc_run->add_option("--cmax", rcmax);
  sc_run->add_option("--pmax", rpmax);

  auto* sc_cache = app.add_subcommand("cache", "coefficient cache management");
  std::string cache_sub, cache_file;
  long long cN = 1000;
  sc_cache->add_option("action", cache_sub, "build|verify|info")->required();
  sc_cache->add_option("--weight", weight);
  sc_cache->add_option("--ncoeffs", cN);
  sc_cache->add_option("--cache", cache_file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_forms->parsed()) return cmd_forms(weight, ncoeffs, cache_path);
    if (sc_arith->parsed()) return cmd_arith(fn, lo, hi, weight, dm, arith_out);
    if (sc_arcs->parsed())
      return cmd_arcs(aX, aH, A, eps, variant, classify, copt->count() > 0);
    if (sc_expsum->parsed()) return cmd_expsum(alpha, eX, weight, expsum_out);
    if (sc_corr->parsed()) return cmd_corr(cX, cH, weight, method, corr_out, threads);
    if (sc_pet->parsed()) return cmd_petersson(pk, pm, pn, cmax);
    if (sc_avgvf->parsed()) return cmd_avgvf(ak, avX, avH, acmax, seed);
    if (sc_moments->parsed()) return cmd_moments(mq, mT, mM, weight, moments_out);
    if (sc_te->parsed()) return cmd_twisted_energy(tq, tX, tH, weight);
    if (sc_cache->parsed()) return cmd_cache(cache_sub, weight, cN, cache_file, seed);
    if (sc_run->parsed()) {
      cc::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = cc::config_from_file(config_path);
      if (!experiment.empty()) cfg.experiment = experiment;
      if (rX >= 0) cfg.X = rX;
      if (rH >= 0) cfg.H = rH;
      if (rtheta >= 0.0) cfg.theta = rtheta;
      if (rA >= 0.0) cfg.A = rA;
      if (reps >= 0.0) cfg.eps = reps;
      if (!rvariant.empty()) cfg.variant = rvariant;
      if (rweight > 0) cfg.weight = rweight;
      if (rq >= 0) cfg.q = rq;
      if (rT >= 0.0) cfg.T = rT;
      if (rM >= 0) cfg.M = rM;
      if (rcmax >= 0) cfg.cmax = rcmax;
      if (rpmax >= 0) cfg.pmax = rpmax;
      if (threads_opt->count() > 0 || cfg.threads < 1) cfg.threads = threads;
      if (seed_opt->count() > 0) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (cfg.experiment.empty())
        throw cc::usage_error("run requires --experiment or a config file");
      return cmd_run(cfg);
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
