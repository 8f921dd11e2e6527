#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "commands.hpp"
#include "wbc/document.hpp"
#include "wbc/hierarchy_io.hpp"

namespace wbc::cli {

namespace {

void print_vector(const char* label, const Eigen::VectorXd& v)
{
  std::printf("%s [", label);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    std::printf(i ? ", %.10g" : "%.10g", v(i));
  std::printf("]\n");
}

}  // namespace

int cmd_solve(const SolveOptions& options)
{
  HierarchyProblem p;
  try {
    p = load_hierarchy_file(options.file);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wbc solve: %s\n", e.what());
    return kExitInput;
  }

  HqpSolution s;
  try {
    s = solve_hierarchy(p.levels, p.n_x);
  } catch (const HqpError& e) {
    std::printf("infeasible: %s\n", e.what());
    std::printf("level %d, constraint row %d\n", e.level() + 1, e.constraint());
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "wbc solve: %s\n", e.what());
    return kExitInput;
  }

  print_vector("x", s.x);
  int offset = 0;
  for (std::size_t l = 0; l < p.levels.size(); ++l) {
    const Level& level = p.levels[l];
    const LevelDiagnostics& d = s.per_level[l];
    std::printf("level %zu (%s): residual %.3e, nullspace %d, active [", l + 1, level.name.c_str(),
                std::sqrt(d.residual_sq), d.nullspace_dim);
    // Active rows are indices into the accumulated stack; print the ones of this level.
    bool first = true;
    for (int r : d.active_constraints)
      if (r >= offset && r < offset + level.D.rows()) {
        std::printf(first ? "%d" : ", %d", r - offset);
        first = false;
      }
    std::printf("]\n");
    offset += static_cast<int>(level.D.rows());
  }
  if (s.degraded)
    std::printf("degraded: level %d infeasible (constraint row %d)\n", s.failed_level + 1,
                s.violated_constraint);

  if (options.bench > 0) {
    using Clock = std::chrono::steady_clock;
    std::vector<double> times;
    times.reserve(options.bench);
    for (int i = 0; i < options.bench; ++i) {
      const auto t0 = Clock::now();
      const HqpSolution r = solve_hierarchy(p.levels, p.n_x);
      times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      if (r.x.size() != p.n_x)
        return kExitFailure;
    }
    std::sort(times.begin(), times.end());
    double sum = 0.0;
    for (double t : times)
      sum += t;
    const std::size_t p99 = std::min(times.size() - 1, static_cast<std::size_t>(0.99 * times.size()));
    std::printf("bench %d solves: mean %.4f ms, p99 %.4f ms, max %.4f ms\n", options.bench,
                1e3 * sum / options.bench, 1e3 * times[p99], 1e3 * times.back());
  }
  return s.degraded ? kExitFailure : kExitOk;
}

}  // namespace wbc::cli
