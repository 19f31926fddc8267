#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "opticoord/io.hpp"

using namespace opticoord;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

int count_fields(const std::string& csv_line) {
  int n = 1;
  for (char c : csv_line) n += c == ',' ? 1 : 0;
  return n;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

nlohmann::json two_agent_config() {
  return nlohmann::json::parse(R"({
    "name": "io_case",
    "seed": 5,
    "graph": {"n_nodes": 2, "edges": [[1, 2, 1.0]]},
    "integration": {"dt": 0.001, "t_end": 1.0, "record_every": 100},
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
  })");
}

}  // namespace

TEST_CASE("trajectory CSV has the documented schema and row count") {
  const Scenario scenario = Scenario::from_json(two_agent_config());
  const ClosedLoopSystem system{scenario};
  const Trajectory traj = system.integrate();

  TempFile file("io_test_trajectory.csv");
  write_trajectory_csv(file.path, traj);
  const std::vector<std::string> lines = lines_of(slurp(file.path));

  // floor(t_end / (dt * record_every)) + 1 data rows plus the header.
  REQUIRE(lines.size() == 12);
  CHECK(lines[0] ==
        "t,y_1,r_1,coord_err_1,track_err_1,nn_err_1,eid_1,theta_1,W_fro_1,"
        "y_2,r_2,coord_err_2,track_err_2,nn_err_2,eid_2,theta_2,W_fro_2");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    CHECK(count_fields(lines[k]) == 17);
  }
  // First column of the first data row is t = 0.
  CHECK(lines[1].substr(0, 2) == "0,");
}

TEST_CASE("run summary carries the oracle value and terminal metrics") {
  const Scenario scenario = Scenario::from_json(two_agent_config());
  const ClosedLoopSystem system{scenario};
  const Trajectory traj = system.integrate();

  TempFile file("io_test_summary.txt");
  write_run_summary(file.path, scenario, system, traj);
  const std::string text = slurp(file.path);

  CHECK(text.find("name = io_case") != std::string::npos);
  CHECK(text.find("y_star = 2.000000") != std::string::npos);
  CHECK(text.find("terminal_max_coord_err = ") != std::string::npos);
  CHECK(text.find("terminal_max_eid = ") != std::string::npos);
  CHECK(text.find("final_consensus_residual = ") != std::string::npos);
  CHECK(text.find("config_hash = 0x") != std::string::npos);
  CHECK(text.find("agent_1_y_final = ") != std::string::npos);
  CHECK(text.find("agent_2_y_final = ") != std::string::npos);
}

TEST_CASE("config echo reloads to the identical scenario") {
  const Scenario scenario = Scenario::from_json(two_agent_config());
  TempFile file("io_test_config.json");
  write_config_echo(file.path, scenario);
  const Scenario reloaded = Scenario::load(file.path);
  CHECK(reloaded.config_hash() == scenario.config_hash());
}

TEST_CASE("generator CSV mirrors the run snapshots") {
  const Scenario scenario = Scenario::from_json(two_agent_config());
  const GeneratorProblem problem = scenario.build_generator_problem();
  Eigen::VectorXd r0(2), v0(2);
  r0 << 0.5, 1.5;
  v0 << 0.0, 0.0;
  const GeneratorRun run = run_generator(problem, r0, v0, 1.0, 1e-3, 100,
                                         Eigen::VectorXd::Constant(1, 2.0));

  TempFile file("io_test_generator.csv");
  write_generator_csv(file.path, run, 2, 1);
  const std::vector<std::string> lines = lines_of(slurp(file.path));
  REQUIRE(lines.size() == 12);
  CHECK(lines[0] == "t,r_1,r_2,v_1,v_2,consensus_residual,distance_to_ystar");

  // Without y* tracking the distance column disappears.
  const GeneratorRun bare = run_generator(problem, r0, v0, 1.0, 1e-3, 100);
  TempFile file2("io_test_generator2.csv");
  write_generator_csv(file2.path, bare, 2, 1);
  CHECK(lines_of(slurp(file2.path))[0] == "t,r_1,r_2,v_1,v_2,consensus_residual");
}

TEST_CASE("generator summary reports convergence numbers") {
  const Scenario scenario = Scenario::from_json(two_agent_config());
  const GeneratorProblem problem = scenario.build_generator_problem();
  Eigen::VectorXd r0(2), v0(2);
  r0 << 0.5, 1.5;
  v0 << 0.0, 0.0;
  const Eigen::VectorXd y_star = Eigen::VectorXd::Constant(1, 2.0);
  const GeneratorRun run = run_generator(problem, r0, v0, 1.0, 1e-3, 100, y_star);

  TempFile file("io_test_gen_summary.txt");
  write_generator_summary(file.path, scenario, run, y_star, 0.0);
  const std::string text = slurp(file.path);
  CHECK(text.find("y_star = 2.000000") != std::string::npos);
  CHECK(text.find("terminal_consensus_residual = ") != std::string::npos);
  CHECK(text.find("terminal_distance_to_ystar = ") != std::string::npos);
  CHECK(text.find("rows = 11") != std::string::npos);
}

TEST_CASE("SVG writers emit well-formed charts") {
  const Scenario scenario = Scenario::from_json(two_agent_config());
  const ClosedLoopSystem system{scenario};
  const Trajectory traj = system.integrate();

  TempFile outputs("io_test_outputs.svg");
  write_outputs_svg(outputs.path, system, traj);
  const std::string svg = slurp(outputs.path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);

  TempFile eid("io_test_eid.svg");
  write_eid_svg(eid.path, traj);
  const std::string eid_svg = slurp(eid.path);
  CHECK(eid_svg.find("</svg>") != std::string::npos);
}

TEST_CASE("writers surface unwritable paths as IoError") {
  Trajectory traj;
  CHECK_THROWS_AS(write_trajectory_csv("no_such_dir/x.csv", traj), IoError);

  // A regular file blocks directory creation beneath it.
  TempFile blocker("io_test_blocker");
  { std::ofstream out(blocker.path); out << "x"; }
  CHECK_THROWS_AS(ensure_directory(blocker.path + "/sub"), IoError);
}

TEST_CASE("numbers render compactly at full precision") {
  // %.12g keeps 12 significant digits; t = 0 prints as "0".
  Trajectory traj;
  traj.dt = 0.1;
  traj.t_end = 0.2;
  traj.record_every = 1;
  for (int k = 0; k <= 2; ++k) {
    MetricRecord rec;
    rec.t = 0.1 * k;
    AgentMetrics m;
    m.y = 1.0 / 3.0;
    rec.agents.push_back(m);
    traj.records.push_back(rec);
  }
  TempFile file("io_test_precision.csv");
  write_trajectory_csv(file.path, traj);
  const std::vector<std::string> lines = lines_of(slurp(file.path));
  REQUIRE(lines.size() == 4);
  CHECK(lines[1].find("0.333333333333") != std::string::npos);
}
