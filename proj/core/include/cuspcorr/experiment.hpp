#pragma once

#include <string>
#include <vector>

#include "cuspcorr/common.hpp"

namespace cuspcorr {

// Parameters of a named batch experiment. H may be given directly or as an
// exponent pair (X, theta) meaning H = ceil(X^theta).
struct ExperimentConfig {
  std::string experiment;
  int weight = 12;
  i64 X = 1024;
  i64 H = 0;
  double theta = 0.0;
  double A = 1.0;
  double eps = 0.05;
  std::string variant = "t1";
  u64 seed = 1;
  i64 q = 1;
  double T = 50.0;
  i64 M = 64;
  i64 cmax = 60;
  i64 pmax = 1'000'000;
  int threads = 1;            // execution detail; not part of the canonical echo
  std::string out_dir;

  i64 resolved_H() const;
  void set(const std::string& key, const std::string& value);
};

ExperimentConfig config_from_file(const std::string& path);

struct CheckRecord {
  std::string name;
  std::string module;
  std::string operation;
  std::string params;
  double value = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
  std::string status;  // pass | fail | soft | info
};

struct TableProvenance {
  int weight = 0;
  i64 ncoeffs = 0;
  std::string source;  // built | cache
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CheckRecord> records;
  std::vector<TableProvenance> tables;
  std::vector<double> timings_ms;  // parallel to records; excluded from canonical JSON

  int hard_pass() const;
  int hard_fail() const;
  int soft_count() const;
  int info_count() const;

  // Canonical serialization: deterministic for a fixed (config, seed),
  // independent of thread count and wall clock.
  std::string to_json() const;
  std::string to_csv() const;
};

extern const std::vector<std::string> kExperimentNames;

ExperimentReport run_experiment(const ExperimentConfig& config);

// Writes report.json / report.csv (and timing.txt) into a fresh run directory
// under config.out_dir; never overwrites an earlier run. Returns the path.
std::string write_report(const ExperimentReport& report);

}  // namespace cuspcorr
