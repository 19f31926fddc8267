#include "opticoord/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "opticoord/io.hpp"
#include "opticoord/oracle.hpp"
#include "opticoord/sim.hpp"

namespace opticoord {

namespace {

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
}

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string vec6(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += " ";
    s += fixed6(v[i]);
  }
  return s;
}

// Prints issues to stderr; true when the scenario is clean.
bool validated(const Scenario& scenario, bool force) {
  if (force) return true;
  const std::vector<std::string> issues = scenario.validate();
  for (const std::string& issue : issues) std::cerr << "validation: " << issue << "\n";
  return issues.empty();
}

// Stacked generator initial conditions, in agent order.
std::pair<Eigen::VectorXd, Eigen::VectorXd> stacked_init(const Scenario& scenario) {
  Eigen::Index dim = 0;
  for (const AgentScenario& a : scenario.agents()) dim += a.generator.r0.size();
  Eigen::VectorXd r0(dim), v0(dim);
  Eigen::Index at = 0;
  for (const AgentScenario& a : scenario.agents()) {
    r0.segment(at, a.generator.r0.size()) = a.generator.r0;
    v0.segment(at, a.generator.v0.size()) = a.generator.v0;
    at += a.generator.r0.size();
  }
  return {r0, v0};
}

CentralProblem central_problem(const Scenario& scenario) {
  GeneratorProblem gp = scenario.build_generator_problem();
  return CentralProblem(std::move(gp.objectives), std::move(gp.sets));
}

}  // namespace

Scenario resolve_scenario(const std::string& arg) { return Scenario::load(arg); }

std::string default_out_dir() {
  const char* env = std::getenv("OPTICOORD_OUT");
  return env && *env ? env : "out";
}

int cmd_validate(const std::string& arg) {
  return guarded([&] {
    const Scenario scenario = resolve_scenario(arg);
    const std::vector<std::string> issues = scenario.validate();
    for (const std::string& issue : issues) std::cout << "issue: " << issue << "\n";
    if (!issues.empty()) {
      std::cout << scenario.name() << ": " << issues.size() << " issue(s)\n";
      return static_cast<int>(kValidationFailure);
    }
    char hash[24];
    std::snprintf(hash, sizeof hash, "0x%016llx",
                  static_cast<unsigned long long>(scenario.config_hash()));
    std::cout << scenario.name() << ": ok (" << scenario.n_agents() << " agents, config_hash "
              << hash << ")\n";
    return static_cast<int>(kOk);
  });
}

int cmd_run(const std::string& arg, const RunOptions& opts) {
  return guarded([&] {
    const Scenario scenario = resolve_scenario(arg);
    if (!validated(scenario, opts.force)) return static_cast<int>(kValidationFailure);

    ensure_directory(opts.out_dir);
    const ClosedLoopSystem system(scenario);
    write_config_echo(opts.out_dir + "/config.json", scenario);

    const Trajectory traj = system.integrate();

    write_trajectory_csv(opts.out_dir + "/trajectory.csv", traj);
    write_run_summary(opts.out_dir + "/summary.txt", scenario, system, traj);
    if (opts.svg) {
      write_outputs_svg(opts.out_dir + "/outputs.svg", system, traj);
      write_eid_svg(opts.out_dir + "/eid.svg", traj);
    }

    std::cout << scenario.name() << ": y* = " << vec6(system.y_star())
              << ", terminal max coordination error = "
              << traj.terminal_sup(0.2, &MetricRecord::max_coord_err) << ", "
              << traj.records.size() << " rows in " << traj.runtime_seconds << " s -> "
              << opts.out_dir << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_generator(const std::string& arg, const RunOptions& opts) {
  return guarded([&] {
    const Scenario scenario = resolve_scenario(arg);
    if (!validated(scenario, opts.force)) return static_cast<int>(kValidationFailure);

    ensure_directory(opts.out_dir);
    write_config_echo(opts.out_dir + "/config.json", scenario);

    const GeneratorProblem problem = scenario.build_generator_problem();
    const SolveResult oracle = solve(central_problem(scenario));
    const auto [r0, v0] = stacked_init(scenario);
    const IntegrationParams& ip = scenario.integration();
    const GeneratorRun run =
        run_generator(problem, r0, v0, ip.t_end, ip.dt, ip.record_every, oracle.y_star);

    write_generator_csv(opts.out_dir + "/generator.csv", run, problem.n_agents, problem.q);
    write_generator_summary(opts.out_dir + "/generator_summary.txt", scenario, run, oracle.y_star,
                            oracle.kkt_residual);

    std::cout << scenario.name() << ": y* = " << vec6(oracle.y_star)
              << ", terminal consensus residual = " << run.terminal_consensus()
              << ", terminal distance to y* = " << run.distance_to_ystar.back() << " -> "
              << opts.out_dir << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_oracle(const std::string& arg) {
  return guarded([&] {
    const Scenario scenario = resolve_scenario(arg);
    const CentralProblem problem = central_problem(scenario);
    const SolveResult result = solve(problem);
    std::cout << "y_star = " << vec6(result.y_star) << "\n"
              << "kkt_residual = " << result.kkt_residual << "\n"
              << "iterations = " << result.iterations << "\n"
              << "total_value = " << problem.total_value(result.y_star) << "\n";
    if (problem.omega0.kind() == SetKind::Box) {
      std::cout << "omega0_lo = " << problem.omega0.lower().transpose() << "\n"
                << "omega0_hi = " << problem.omega0.upper().transpose() << "\n";
    }
    return static_cast<int>(kOk);
  });
}

void apply_override(Scenario& scenario, const std::string& param, double value) {
  if (param == "dt") {
    scenario.integration().dt = value;
    return;
  }
  if (param == "t_end") {
    scenario.integration().t_end = value;
    return;
  }
  if (param == "ell") {
    for (AgentScenario& a : scenario.agents()) a.controller.ell = value;
    return;
  }
  if (param == "n_w") {
    const int n_w = static_cast<int>(std::llround(value));
    if (n_w < 2) throw std::invalid_argument("sweep: n_w must be at least 2");
    for (AgentScenario& a : scenario.agents()) {
      RbfConfig& rbf = a.controller.rbf;
      if (rbf.n_w >= 2) {
        const double spacing_old = (rbf.hi - rbf.lo) / (rbf.n_w - 1);
        const double spacing_new = (rbf.hi - rbf.lo) / (n_w - 1);
        rbf.kappa *= spacing_new / spacing_old;
      }
      rbf.n_w = n_w;
    }
    return;
  }
  throw std::invalid_argument("sweep: unknown parameter '" + param + "'");
}

int cmd_sweep(const std::string& arg, const std::string& param, const std::vector<double>& values,
              const RunOptions& opts) {
  return guarded([&] {
    const Scenario base = resolve_scenario(arg);
    ensure_directory(opts.out_dir);

    std::ofstream table(opts.out_dir + "/sweep.csv");
    if (!table) throw IoError("cannot open '" + opts.out_dir + "/sweep.csv' for writing");
    table << "param,value,terminal_coord_err,terminal_track_err,runtime_seconds\n";
    std::cout << "param,value,terminal_coord_err,terminal_track_err,runtime_seconds\n";

    for (double value : values) {
      Scenario scenario = base;
      apply_override(scenario, param, value);
      if (!validated(scenario, opts.force)) return static_cast<int>(kValidationFailure);
      const ClosedLoopSystem system(scenario);
      const Trajectory traj = system.integrate();
      const double coord = traj.terminal_sup(0.2, &MetricRecord::max_coord_err);
      const double track = traj.terminal_sup(0.2, &MetricRecord::max_track_err);
      char line[160];
      std::snprintf(line, sizeof line, "%s,%.12g,%.12g,%.12g,%.3f", param.c_str(), value, coord,
                    track, traj.runtime_seconds);
      table << line << "\n";
      std::cout << line << "\n";
    }
    table.flush();
    if (!table) throw IoError("failed writing sweep table");
    return static_cast<int>(kOk);
  });
}

}  // namespace opticoord
