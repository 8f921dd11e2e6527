#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "wbc/document.hpp"
#include "wbc/model.hpp"
#include "wbc/scenario.hpp"

namespace wbc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Job
{
  std::string source;
  ScenarioConfig config;
  RobotModel model;
};

ScenarioConfig load_config(const std::string& source)
{
  if (!fs::exists(source)) {
    for (ScenarioType t : {ScenarioType::kFlatPush, ScenarioType::kSeesaw, ScenarioType::kMovingSupport})
      if (source == to_string(t))
        return default_scenario(t);
  }
  return load_scenario_file(source);
}

json report_json(const ScenarioResult& r, const std::string& source, const std::string& log_path)
{
  const ScenarioStats& s = r.stats;
  json levels = json::array();
  for (std::size_t l = 0; l < s.residual_max.size(); ++l)
    levels.push_back({{"level", l + 1}, {"max", s.residual_max[l]}, {"mean", s.residual_mean[l]}});
  const double qp_share = s.tick_mean > 0.0 ? s.qp_mean / s.tick_mean : 0.0;
  return {
      {"scenario", r.name},
      {"config", source},
      {"verdict", r.verdict},
      {"message", r.message},
      {"simulated_s", r.duration},
      {"ticks", s.ticks},
      {"residuals", levels},
      {"timing_ms",
       {{"mean", s.tick_mean * 1e3},
        {"max", s.tick_max * 1e3},
        {"p99", s.tick_p99 * 1e3},
        {"qp_mean", s.qp_mean * 1e3},
        {"projection_mean", s.projection_mean * 1e3},
        {"qp_share", qp_share}}},
      {"violations", s.violations},
      {"degraded_ticks", s.degraded_ticks},
      {"max_zmp_excursion_s", s.max_zmp_excursion},
      {"four_corner_fraction", s.four_corner_fraction},
      {"min_com_height_fraction", s.min_com_height_fraction},
      {"joint_limit_breach", s.joint_limit_breach},
      {"steady_foot_position_error_m", s.steady_foot_position_error},
      {"steady_foot_orientation_error_rad", s.steady_foot_orientation_error},
      {"max_surface_misalignment_rad", s.max_surface_misalignment},
      {"outputs", {{"log", log_path}}},
  };
}

}  // namespace

int cmd_run(const RunOptions& options)
{
  std::vector<Job> jobs;
  try {
    for (const std::string& source : options.configs) {
      ScenarioConfig c = load_config(source);
      if (options.seed >= 0) {
        c.seed = static_cast<unsigned>(options.seed);
        c.sim.seed = c.seed;
      }
      c.validate();
      RobotModel m = scenario_model(c);
      jobs.push_back({source, std::move(c), std::move(m)});
    }
    fs::create_directories(options.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wbc run: %s\n", e.what());
    return kExitInput;
  }

  std::vector<json> reports(jobs.size());
  std::vector<int> codes(jobs.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  std::mutex out_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      log(1, "running %s (%.1f s)", job.config.name.c_str(), job.config.horizon);
      try {
        const ScenarioResult r = run_scenario(job.config, job.model);
        const std::string base = (fs::path(options.out_dir) / job.config.name).string();
        const std::string log_path = base + ".csv";
        {
          std::ofstream csv(log_path);
          write_log_csv(r, job.model, csv);
        }
        reports[i] = report_json(r, job.source, log_path);
        std::ofstream(base + "_report.json") << reports[i].dump(2) << '\n';
        codes[i] = (r.balanced() && r.stats.violations == 0) ? kExitOk : kExitFailure;
        std::lock_guard<std::mutex> lock(out_mutex);
        log(1, "%s: %s%s%s", r.name.c_str(), r.verdict.c_str(), r.message.empty() ? "" : ", ",
            r.message.c_str());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(out_mutex);
        std::fprintf(stderr, "wbc run: %s: %s\n", job.config.name.c_str(), e.what());
        reports[i] = {{"scenario", job.config.name}, {"config", job.source}, {"verdict", "error"},
                      {"message", e.what()}};
        codes[i] = kExitFailure;
      }
    }
  };

  const int threads = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();

  json summary = reports.size() == 1 ? reports.front() : json(reports);
  std::printf("%s\n", summary.dump(2).c_str());
  for (int c : codes)
    if (c != kExitOk)
      return c;
  return kExitOk;
}

}  // namespace wbc::cli
