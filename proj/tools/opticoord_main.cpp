// Command-line front end. Exit codes: 0 success, 1 validation/usage failure,
// 2 integration divergence, 3 I/O failure.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opticoord/runner.hpp"

int main(int argc, char** argv) {
  using namespace opticoord;

  CLI::App app{"opticoord: distributed constrained optimal coordination of "
               "high-order nonlinear agents"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string sweep_param;
  std::vector<double> sweep_values;
  RunOptions opts;
  opts.out_dir = default_out_dir();

  const std::string scenario_help = "preset name (example1, example2) or scenario JSON path";

  CLI::App* validate = app.add_subcommand("validate", "check a scenario and report every issue");
  validate->add_option("scenario", scenario_arg, scenario_help)->required();

  CLI::App* run = app.add_subcommand("run", "integrate the full closed loop and write outputs");
  run->add_option("scenario", scenario_arg, scenario_help)->required();
  run->add_option("--out", opts.out_dir, "output directory (default: $OPTICOORD_OUT or ./out)");
  run->add_flag("--svg", opts.svg, "also write SVG charts");
  run->add_flag("--force", opts.force, "skip validation (diagnose known-bad configs)");

  CLI::App* generator = app.add_subcommand("generator", "integrate only the optimal-signal generator");
  generator->add_option("scenario", scenario_arg, scenario_help)->required();
  generator->add_option("--out", opts.out_dir, "output directory");
  generator->add_flag("--force", opts.force, "skip validation");

  CLI::App* oracle = app.add_subcommand("oracle", "solve the centralized problem and print y*");
  oracle->add_option("scenario", scenario_arg, scenario_help)->required();

  CLI::App* sweep = app.add_subcommand("sweep", "rerun one scenario over a parameter list");
  sweep->add_option("scenario", scenario_arg, scenario_help)->required();
  sweep->add_option("--param", sweep_param, "parameter to vary")
      ->required()
      ->check(CLI::IsMember({"n_w", "ell", "dt", "t_end"}));
  sweep->add_option("--values", sweep_values, "values to run (omit for an empty report)");
  sweep->add_option("--out", opts.out_dir, "output directory");
  sweep->add_flag("--force", opts.force, "skip validation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationFailure;
  }

  if (validate->parsed()) return cmd_validate(scenario_arg);
  if (run->parsed()) return cmd_run(scenario_arg, opts);
  if (generator->parsed()) return cmd_generator(scenario_arg, opts);
  if (oracle->parsed()) return cmd_oracle(scenario_arg);
  if (sweep->parsed()) return cmd_sweep(scenario_arg, sweep_param, sweep_values, opts);
  return kValidationFailure;  // unreachable with require_subcommand(1)
}
