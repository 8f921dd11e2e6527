#include <cstdarg>
#include <cstdio>
#include <cstdlib>

#include <CLI11.hpp>

#include "commands.hpp"

namespace wbc::cli {

int log_level()
{
  static const int level = [] {
    const char* env = std::getenv("WBC_LOG");
    return env ? std::atoi(env) : 1;
  }();
  return level;
}

void log(int level, const char* fmt, ...)
{
  if (level > log_level())
    return;
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace wbc::cli

int main(int argc, char** argv)
{
  using namespace wbc::cli;
  CLI::App app{"Whole-body balance control toolkit"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run balance scenarios and write logs and reports");
  run_cmd->add_option("config", run.configs,
                      "Scenario files, or the built-in names flat_push, seesaw, moving_support")
      ->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--jobs", run.jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

  IdentifyOptions ident;
  auto* id_cmd = app.add_subcommand("identify", "Dynamic parameter identification");
  id_cmd->add_option("model", ident.model,
                     "Model file, or the built-in names walker3_leg, planar_double, pendulum")
      ->required();
  id_cmd->add_option("--mode", ident.mode, "synth or dataset")
      ->check(CLI::IsMember({"synth", "dataset"}));
  id_cmd->add_option("--data", ident.data, "Dataset CSV for dataset mode");
  id_cmd->add_option("--trajectory", ident.trajectory, "Excitation trajectory file (synth mode)");
  id_cmd->add_option("--noise", ident.noise, "Torque noise sigma, N*m")->check(CLI::NonNegativeNumber);
  id_cmd->add_flag("--no-friction", ident.no_friction, "Estimate without the friction terms");
  id_cmd->add_option("--seed", ident.seed, "Noise and optimizer seed");
  id_cmd->add_option("--duration", ident.duration, "Synthetic record length, s")
      ->check(CLI::PositiveNumber);
  id_cmd->add_option("--rate", ident.rate, "Sample rate, Hz")->check(CLI::PositiveNumber);
  id_cmd->add_option("--evaluations", ident.evaluations, "Optimizer evaluations per start")
      ->check(CLI::PositiveNumber);
  id_cmd->add_option("--filter", ident.filter_cutoff, "Velocity low-pass cutoff, Hz (0: off)")
      ->check(CLI::NonNegativeNumber);
  id_cmd->add_option("--out", ident.out_dir, "Directory for the dataset, trajectory and report");

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a hierarchy file");
  solve_cmd->add_option("file", solve.file, "Hierarchy document")->required();
  solve_cmd->add_option("--bench", solve.bench, "Repeat the solve N times and print timing")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (*run_cmd)
    return cmd_run(run);
  if (*id_cmd)
    return cmd_identify(ident);
  return cmd_solve(solve);
}
