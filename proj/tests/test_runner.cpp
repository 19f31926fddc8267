#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "opticoord/io.hpp"
#include "opticoord/runner.hpp"

using namespace opticoord;

namespace {

struct TempDir {
  std::string path;
  explicit TempDir(std::string p) : path(std::move(p)) {}
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::string fast_scenario_json() {
  return R"({
    "name": "fast",
    "seed": 9,
    "graph": {"n_nodes": 2, "edges": [[1, 2, 1.0]]},
    "integration": {"dt": 0.001, "t_end": 0.5, "record_every": 50},
    "agents": [
      {
        "plant": {"kind": "vanderpol"},
        "objective": {"kind": "quadratic", "Q": [[2.0]], "center": [1.0]},
        "constraint": {"kind": "interval", "lo": -4.0, "hi": 4.0},
        "disturbance": {"kind": "example1", "index": 1}
      },
      {
        "plant": {"kind": "vanderpol"},
        "objective": {"kind": "quadratic", "Q": [[2.0]], "center": [3.0]},
        "constraint": {"kind": "interval", "lo": -4.0, "hi": 4.0},
        "disturbance": {"kind": "example1", "index": 2}
      }
    ]
  })";
}

// ell < 0 destabilizes the adaptive laws; validation rejects it, --force
// runs it into the divergence guard.
std::string divergent_scenario_json() {
  nlohmann::json j = nlohmann::json::parse(fast_scenario_json());
  j["name"] = "divergent";
  j["integration"]["t_end"] = 5.0;
  j["integration"]["dt"] = 0.01;
  j["agents"][0]["controller"] = {{"ell", -40.0}};
  j["agents"][0]["generator"]["r0"] = {0.9};
  return j.dump();
}

}  // namespace

TEST_CASE("resolve_scenario accepts presets and files") {
  CHECK(resolve_scenario("example1").name() == "example1");

  TempFile file("runner_test_scenario.json");
  { std::ofstream out(file.path); out << fast_scenario_json(); }
  CHECK(resolve_scenario(file.path).name() == "fast");
}

TEST_CASE("cmd_validate distinguishes good, bad, and unreadable inputs") {
  CHECK(cmd_validate("example1") == kOk);
  CHECK(cmd_validate("no_such_scenario.json") == kIoFailure);

  // Disconnected graph: parses, fails validation.
  nlohmann::json j = nlohmann::json::parse(fast_scenario_json());
  j["graph"]["edges"] = nlohmann::json::array();
  TempFile bad("runner_test_bad.json");
  { std::ofstream out(bad.path); out << j.dump(); }
  CHECK(cmd_validate(bad.path) == kValidationFailure);

  // Malformed JSON maps to validation failure, not an I/O failure.
  TempFile mangled("runner_test_mangled.json");
  { std::ofstream out(mangled.path); out << "{ not json"; }
  CHECK(cmd_validate(mangled.path) == kValidationFailure);
}

TEST_CASE("cmd_run writes the full artifact set and exits zero") {
  TempFile file("runner_test_run.json");
  { std::ofstream out(file.path); out << fast_scenario_json(); }
  TempDir dir("runner_test_out");

  RunOptions opts;
  opts.out_dir = dir.path;
  opts.svg = true;
  CHECK(cmd_run(file.path, opts) == kOk);

  CHECK(std::filesystem::exists(dir.path + "/trajectory.csv"));
  CHECK(std::filesystem::exists(dir.path + "/summary.txt"));
  CHECK(std::filesystem::exists(dir.path + "/config.json"));
  CHECK(std::filesystem::exists(dir.path + "/outputs.svg"));
  CHECK(std::filesystem::exists(dir.path + "/eid.svg"));

  // The config echo is itself a runnable scenario with the same hash.
  const Scenario original = resolve_scenario(file.path);
  const Scenario echoed = resolve_scenario(dir.path + "/config.json");
  CHECK(original.config_hash() == echoed.config_hash());
}

TEST_CASE("cmd_run refuses invalid scenarios unless forced") {
  TempFile file("runner_test_div.json");
  { std::ofstream out(file.path); out << divergent_scenario_json(); }
  TempDir dir("runner_test_div_out");

  RunOptions opts;
  opts.out_dir = dir.path;
  CHECK(cmd_run(file.path, opts) == kValidationFailure);

  opts.force = true;
  CHECK(cmd_run(file.path, opts) == kDivergence);
}

TEST_CASE("cmd_generator and cmd_oracle succeed on the benchmark") {
  TempDir dir("runner_test_gen_out");
  RunOptions opts;
  opts.out_dir = dir.path;

  TempFile file("runner_test_gen.json");
  { std::ofstream out(file.path); out << fast_scenario_json(); }
  CHECK(cmd_generator(file.path, opts) == kOk);
  CHECK(std::filesystem::exists(dir.path + "/generator.csv"));
  CHECK(std::filesystem::exists(dir.path + "/generator_summary.txt"));

  CHECK(cmd_oracle(file.path) == kOk);
  CHECK(cmd_oracle("example1") == kOk);
}

TEST_CASE("apply_override adjusts the scenario in place") {
  Scenario s = Scenario::preset("example1");

  apply_override(s, "dt", 0.002);
  CHECK(s.integration().dt == doctest::Approx(0.002));
  apply_override(s, "t_end", 42.0);
  CHECK(s.integration().t_end == doctest::Approx(42.0));
  apply_override(s, "ell", 0.05);
  for (const AgentScenario& a : s.agents()) CHECK(a.controller.ell == doctest::Approx(0.05));

  // n_w = 5 on [-5, 5]: spacing grows 0.5 -> 2.5, so kappa scales by 5.
  const double kappa_before = s.agents()[0].controller.rbf.kappa;
  apply_override(s, "n_w", 5.0);
  for (const AgentScenario& a : s.agents()) {
    CHECK(a.controller.rbf.n_w == 5);
    CHECK(a.controller.rbf.kappa == doctest::Approx(5.0 * kappa_before));
  }

  CHECK_THROWS_AS(apply_override(s, "n_w", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(s, "bogus", 1.0), std::invalid_argument);

  // Plain setters defer range checks to validation, which must flag them.
  apply_override(s, "dt", -1.0);
  CHECK_FALSE(s.validate().empty());
}

TEST_CASE("cmd_sweep writes one row per value plus a header") {
  TempFile file("runner_test_sweep.json");
  { std::ofstream out(file.path); out << fast_scenario_json(); }
  TempDir dir("runner_test_sweep_out");
  RunOptions opts;
  opts.out_dir = dir.path;

  CHECK(cmd_sweep(file.path, "ell", {0.01, 0.1}, opts) == kOk);
  std::ifstream in(dir.path + "/sweep.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "param,value,terminal_coord_err,terminal_track_err,runtime_seconds");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("ell,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("cmd_sweep with no values still writes the header") {
  TempFile file("runner_test_sweep_empty.json");
  { std::ofstream out(file.path); out << fast_scenario_json(); }
  TempDir dir("runner_test_sweep_empty_out");
  RunOptions opts;
  opts.out_dir = dir.path;

  CHECK(cmd_sweep(file.path, "n_w", {}, opts) == kOk);
  std::ifstream in(dir.path + "/sweep.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "param,value,terminal_coord_err,terminal_track_err,runtime_seconds");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("default_out_dir honors the environment override") {
  // Only checks the fallback; the env-var path is covered by CLI usage.
  if (std::getenv("OPTICOORD_OUT") == nullptr) {
    CHECK(default_out_dir() == "out");
  }
}
