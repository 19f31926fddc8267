// Subcommand implementations shared by the CLI binary and the tests. Every
// command returns a process exit code instead of throwing.

#pragma once

#include <string>
#include <vector>

#include "opticoord/scenario.hpp"

namespace opticoord {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,  // bad configuration, parse errors, failed checks
  kDivergence = 2,         // integration left the guard band
  kIoFailure = 3,          // unreadable input / unwritable output
};

struct RunOptions {
  std::string out_dir = "out";
  bool svg = false;
  bool force = false;  // skip validation; diagnostic runs of known-bad configs
};

// A positional scenario argument is a preset name or a JSON file path.
Scenario resolve_scenario(const std::string& arg);

// $OPTICOORD_OUT when set, "out" otherwise.
std::string default_out_dir();

int cmd_validate(const std::string& arg);
int cmd_run(const std::string& arg, const RunOptions& opts);
int cmd_generator(const std::string& arg, const RunOptions& opts);
int cmd_oracle(const std::string& arg);
int cmd_sweep(const std::string& arg, const std::string& param, const std::vector<double>& values,
              const RunOptions& opts);

// Single sweep override. "n_w" also rescales kappa by the change in center
// spacing so the relative RBF overlap stays fixed; "ell" retunes every
// agent; "dt"/"t_end" adjust integration.
void apply_override(Scenario& scenario, const std::string& param, double value);

}  // namespace opticoord
