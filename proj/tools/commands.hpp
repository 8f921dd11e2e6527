#pragma once

#include <string>
#include <vector>

namespace wbc::cli {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // run-level failure (fall, infeasible, rank deficient)
inline constexpr int kExitInput = 2;    // unreadable or malformed input

/// WBC_LOG=0 silences progress messages, WBC_LOG=2 adds detail.
int log_level();
void log(int level, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

struct RunOptions
{
  std::vector<std::string> configs;
  std::string out_dir = ".";
  long seed = -1;  // < 0: keep the config's seed
  int jobs = 1;
};

struct IdentifyOptions
{
  std::string model;
  std::string mode = "synth";
  std::string data;
  std::string trajectory;  // optional excitation file for synth mode
  std::string out_dir;     // empty: no files
  double noise = 0.05;
  bool no_friction = false;
  unsigned seed = 1;
  double duration = 60.0;
  double rate = 200.0;
  int evaluations = 600;
  double filter_cutoff = 0.0;  // Hz, 0 disables velocity filtering
};

struct SolveOptions
{
  std::string file;
  int bench = 0;
};

int cmd_run(const RunOptions& options);
int cmd_identify(const IdentifyOptions& options);
int cmd_solve(const SolveOptions& options);

}  // namespace wbc::cli
