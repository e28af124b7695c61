#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edgesim/cli.hpp"
#include "edgesim/config.hpp"
#include "edgesim/errors.hpp"
#include "edgesim/harness.hpp"
#include "edgesim/trace_io.hpp"

using namespace edgesim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("edgesim_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_command(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string small_config_text() {
  ExperimentConfig cfg = default_config();
  cfg.topology.grid_rows = 3;
  cfg.topology.grid_cols = 3;
  cfg.controller.power_budget = 430.0;
  cfg.slots = 20;
  return emit_config(cfg);
}

}  // namespace

TEST_CASE("number formatting is stable") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(125.18639783792266) == "125.186397838");
  CHECK(format_number(1e-13) == "1e-13");
}

TEST_CASE("config roundtrip and validation") {
  const std::string canonical = emit_config(default_config());
  CHECK(emit_config(parse_config(canonical)) == canonical);
  CHECK(emit_config(parse_config("{}")) == canonical);

  CHECK_THROWS_AS(parse_config("{\"mystery\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"topology\": {\"grid_rows\": 1}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"slots\": -5}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"policy\": \"GREEDY\"}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"controller\": {\"tradeoff_V\": -1}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);

  const ExperimentConfig parsed = parse_config(
      "{\"congestion\": {\"kind\": \"constant\", \"value\": 2.0}, \"slots\": 7}");
  CHECK(parsed.congestion.kind == CongestionModel::Kind::Constant);
  CHECK(parsed.slots == 7);

  const RunSpec spec = make_run_spec(default_config());
  CHECK(spec.topology.num_stations() == 16);
  CHECK(spec.slots == 200);
}

TEST_CASE("per-region traffic overrides") {
  ExperimentConfig cfg = default_config();
  cfg.topology.grid_rows = 3;
  cfg.topology.grid_cols = 3;
  cfg.traffic_mean_per_region = std::vector<double>(9, 2.0);
  const RunSpec spec = make_run_spec(cfg);
  CHECK(spec.traffic.mean == std::vector<double>(9, 2.0));

  cfg.traffic_mean_per_region = std::vector<double>(4, 2.0);  // wrong length
  CHECK_THROWS_AS(make_run_spec(cfg), ConfigError);
}

TEST_CASE("print-defaults matches the canonical document") {
  std::string out;
  CHECK(run({"--print-defaults"}, &out) == kExitOk);
  CHECK(emit_config(parse_config(out)) == emit_config(default_config()));
}

TEST_CASE("min-cover subcommand") {
  std::string out;
  CHECK(run({"min-cover"}, &out) == kExitOk);
  CHECK(out == "9\n");

  TempDir tmp;
  ExperimentConfig cfg = default_config();
  cfg.topology.grid_rows = 2;
  cfg.topology.grid_cols = 2;
  spill(tmp.path / "cfg.json", emit_config(cfg));
  CHECK(run({"min-cover", "--config", (tmp.path / "cfg.json").string()}, &out) == kExitOk);
  CHECK(out == "1\n");
}

TEST_CASE("usage and io failures set distinct exit codes") {
  std::string out, err;
  CHECK(run({"min-cover", "--bogus"}, &out, &err) == kExitUsage);
  CHECK(err.find("usage") != std::string::npos);

  CHECK(run({}, &out, &err) == kExitUsage);
  CHECK(run({"run", "--config", "/nonexistent/config.json"}, &out, &err) == kExitIo);
  CHECK(err.find("io") != std::string::npos);

  // Infeasible instances surface as their own failure class.
  TempDir tmp;
  ExperimentConfig cfg = default_config();
  cfg.topology.grid_rows = 3;
  cfg.topology.grid_cols = 3;
  cfg.topology.power_cap = 50.0;  // below the idle draw
  cfg.slots = 3;
  spill(tmp.path / "cfg.json", emit_config(cfg));
  CHECK(run({"run", "--config", (tmp.path / "cfg.json").string(), "--out",
             (tmp.path / "out").string()},
            &out, &err) == kExitInfeasible);

  spill(tmp.path / "bad.json", "{\"mystery\": 1}");
  CHECK(run({"min-cover", "--config", (tmp.path / "bad.json").string()}, &out, &err) ==
        kExitUsage);
}

TEST_CASE("run subcommand writes trace and summary") {
  TempDir tmp;
  spill(tmp.path / "cfg.json", small_config_text());
  const std::string cfg_path = (tmp.path / "cfg.json").string();

  std::string out;
  CHECK(run({"run", "--config", cfg_path, "--seed", "3", "--out",
             (tmp.path / "a").string()},
            &out) == kExitOk);
  CHECK(out.find("seed=3") != std::string::npos);
  REQUIRE(fs::exists(tmp.path / "a" / "trace.csv"));
  REQUIRE(fs::exists(tmp.path / "a" / "summary.json"));

  // Byte-for-byte reproducibility across invocations.
  CHECK(run({"run", "--config", cfg_path, "--seed", "3", "--out",
             (tmp.path / "b").string()},
            &out) == kExitOk);
  CHECK(slurp(tmp.path / "a" / "trace.csv") == slurp(tmp.path / "b" / "trace.csv"));
  CHECK(slurp(tmp.path / "a" / "summary.json") == slurp(tmp.path / "b" / "summary.json"));

  const std::string trace = slurp(tmp.path / "a" / "trace.csv");
  CHECK(trace.rfind("# edgesim-trace-v1", 0) == 0);
  const std::string summary = slurp(tmp.path / "a" / "summary.json");
  CHECK(summary.find("\"edgesim-summary-v1\"") != std::string::npos);
  CHECK(summary.find("\"seed\": 3") != std::string::npos);
}

TEST_CASE("multi-seed run aggregates") {
  TempDir tmp;
  spill(tmp.path / "cfg.json", small_config_text());
  std::string out;
  CHECK(run({"run", "--config", (tmp.path / "cfg.json").string(), "--seeds", "1..3",
             "--out", tmp.path.string()},
            &out) == kExitOk);
  for (int seed = 1; seed <= 3; ++seed) {
    CHECK(fs::exists(tmp.path / ("trace_" + std::to_string(seed) + ".csv")));
    CHECK(fs::exists(tmp.path / ("summary_" + std::to_string(seed) + ".json")));
  }
  CHECK(out.find("seeds=3") != std::string::npos);
}

TEST_CASE("sweep subcommand writes csv and json") {
  TempDir tmp;
  spill(tmp.path / "cfg.json", small_config_text());
  std::string out;
  CHECK(run({"sweep", "--config", (tmp.path / "cfg.json").string(), "--param", "Q",
             "--values", "420,520", "--seeds", "1..2", "--out", tmp.path.string()},
            &out) == kExitOk);
  CHECK(out.find("trend") != std::string::npos);
  REQUIRE(fs::exists(tmp.path / "sweep.csv"));
  REQUIRE(fs::exists(tmp.path / "sweep.json"));
  const std::string json = slurp(tmp.path / "sweep.json");
  CHECK(json.find("\"edgesim-sweep-v1\"") != std::string::npos);

  std::string err;
  CHECK(run({"sweep", "--config", (tmp.path / "cfg.json").string(), "--param", "bogus",
             "--values", "1"},
            &out, &err) == kExitUsage);
}

TEST_CASE("gibbs-check subcommand") {
  std::string out;
  CHECK(run({"gibbs-check", "--bs", "2", "--tau", "0.5", "--iters", "20000", "--seed",
             "5"},
            &out) == kExitOk);
  CHECK(out.find("=> PASS") != std::string::npos);

  std::string err;
  CHECK(run({"gibbs-check", "--bs", "7"}, &out, &err) == kExitUsage);
}

TEST_CASE("verify-bounds subcommand") {
  TempDir tmp;
  spill(tmp.path / "cfg.json", small_config_text());
  std::string out;
  CHECK(run({"verify-bounds", "--config", (tmp.path / "cfg.json").string(), "--seeds",
             "1..3"},
            &out) == kExitOk);
  CHECK(out.find("queue telescoping: PASS") != std::string::npos);
  CHECK(out.find("delay:") != std::string::npos);
}

TEST_CASE("golden default trace for seed one") {
  TempDir tmp;
  std::string out;
  CHECK(run({"run", "--seed", "1", "--out", tmp.path.string()}, &out) == kExitOk);
  const fs::path data_dir(EDGESIM_TEST_DATA_DIR);
  CHECK(slurp(tmp.path / "trace.csv") == slurp(data_dir / "golden_trace_seed1.csv"));
  CHECK(slurp(tmp.path / "summary.json") == slurp(data_dir / "golden_summary_seed1.json"));
}
