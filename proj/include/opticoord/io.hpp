// Output writers: trajectory and generator CSV files, the key = value run
// summary, the canonical config echo, and small self-contained SVG charts.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "opticoord/generator.hpp"
#include "opticoord/scenario.hpp"
#include "opticoord/sim.hpp"

namespace opticoord {

// Filesystem-level failures (unreadable scenario file, unwritable output
// directory); the CLI maps this to its I/O exit code.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void ensure_directory(const std::string& dir);

// Columns: t, then per agent i (1-based):
//   y_i, r_i, coord_err_i, track_err_i, nn_err_i, eid_i, theta_i, W_fro_i.
// One row per recorded instant, floor(t_end / (dt * record_every)) + 1 total.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Columns: t, the r blocks componentwise, the v blocks componentwise,
// consensus_residual, and (when the run tracked it) distance_to_ystar.
void write_generator_csv(const std::string& path, const GeneratorRun& run, int n_agents, int q);

// Plain "key = value" lines; y_star is printed with six decimals.
void write_run_summary(const std::string& path, const Scenario& scenario,
                       const ClosedLoopSystem& system, const Trajectory& traj);
void write_generator_summary(const std::string& path, const Scenario& scenario,
                             const GeneratorRun& run, const Eigen::VectorXd& y_star,
                             double kkt_residual);

// Resolved scenario echo; reloading it reproduces the run bit for bit.
void write_config_echo(const std::string& path, const Scenario& scenario);

// Agent outputs y_i(t) with a y* rule, and the internal-model errors e_id(t).
void write_outputs_svg(const std::string& path, const ClosedLoopSystem& system,
                       const Trajectory& traj);
void write_eid_svg(const std::string& path, const Trajectory& traj);

}  // namespace opticoord
