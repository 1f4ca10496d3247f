#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cuspcorr/experiment.hpp"

using namespace cuspcorr;
namespace fs = std::filesystem;

TEST_CASE("config parsing") {
  auto tmp = fs::temp_directory_path() / "cuspcorr_cfg.txt";
  {
    std::ofstream os(tmp);
    os << "# comment line\n";
    os << "experiment = vaughan\n";
    os << "X=2048\n";
    os << "theta = 0.8   # trailing comment\n";
    os << "seed = 99\n";
  }
  ExperimentConfig cfg = config_from_file(tmp.string());
  CHECK(cfg.experiment == "vaughan");
  CHECK(cfg.X == 2048);
  CHECK(cfg.theta == 0.8);
  CHECK(cfg.seed == 99);
  CHECK(cfg.resolved_H() == (i64)std::ceil(std::pow(2048.0, 0.8)));

  cfg.set("H", "100");
  CHECK(cfg.resolved_H() == 100);  // explicit H wins over theta
  CHECK_THROWS_AS(cfg.set("bogus", "1"), usage_error);

  {
    std::ofstream os(tmp);
    os << "not a key value line\n";
  }
  CHECK_THROWS_AS(config_from_file(tmp.string()), usage_error);
  fs::remove(tmp);
}

TEST_CASE("unknown experiment is a usage error") {
  ExperimentConfig cfg;
  cfg.experiment = "no-such-thing";
  CHECK_THROWS_AS(run_experiment(cfg), usage_error);
}

TEST_CASE("reports are deterministic and self-describing") {
  ExperimentConfig cfg;
  cfg.experiment = "heathbrown";
  cfg.seed = 1234;
  cfg.threads = 1;
  ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.hard_fail() == 0);
  CHECK(rep.records.size() >= 2);

  std::string j1 = rep.to_json();
  ExperimentReport rep2 = run_experiment(cfg);
  CHECK(j1 == rep2.to_json());

  cfg.threads = 4;
  ExperimentReport rep4 = run_experiment(cfg);
  CHECK(j1 == rep4.to_json());

  auto parsed = nlohmann::json::parse(j1);
  CHECK(parsed["experiment"] == "heathbrown");
  CHECK(parsed["config"]["seed"] == 1234);
  CHECK(parsed["summary"]["hard_fail"] == 0);
  CHECK(parsed["records"].is_array());
  for (const auto& r : parsed["records"]) {
    CHECK(r.contains("module"));
    CHECK(r.contains("operation"));
    CHECK(r.contains("params"));
    CHECK(r.contains("status"));
  }

  std::string csv = rep.to_csv();
  CHECK(csv.rfind("name,module,operation,params,value,envelope,ratio,status\n", 0) == 0);
}

TEST_CASE("run directories append, never overwrite") {
  ExperimentConfig cfg;
  cfg.experiment = "heathbrown";
  cfg.out_dir = (fs::temp_directory_path() / "cuspcorr_runs").string();
  fs::remove_all(cfg.out_dir);
  ExperimentReport rep = run_experiment(cfg);
  std::string d1 = write_report(rep);
  std::string d2 = write_report(rep);
  CHECK(d1 != d2);
  CHECK(fs::exists(fs::path(d1) / "report.json"));
  CHECK(fs::exists(fs::path(d1) / "report.csv"));
  CHECK(fs::exists(fs::path(d2) / "report.json"));
  std::ifstream a(fs::path(d1) / "report.json"), b(fs::path(d2) / "report.json");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("experiment catalogue runs clean at unit scale") {
  // heavier experiments are exercised by the acceptance suite; these small
  // configurations just have to run and pass their own hard checks
  for (const std::string& name :
       {std::string("hecke-identities"), std::string("convolution-oracles"),
        std::string("circle-identity")}) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.X = name == "circle-identity" ? 256 : 500;
    cfg.H = name == "circle-identity" ? 32 : 0;
    cfg.weight = name == "hecke-identities" ? 16 : 12;
    ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.hard_fail() == 0);
  }
}
