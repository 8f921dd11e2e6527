#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "wbc/document.hpp"
#include "wbc/identification.hpp"
#include "wbc/model_io.hpp"
#include "wbc/robots.hpp"

namespace wbc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

RobotModel load_identification_model(const std::string& source)
{
  if (!fs::exists(source)) {
    if (source == "walker3_leg")
      return build_walker3_leg();
    if (source == "planar_double")
      return build_planar_double();
    if (source == "pendulum")
      return build_pendulum();
  }
  return load_model_file(source);
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
  return {v.data(), v.data() + v.size()};
}

json per_joint(const RobotModel& model, const Eigen::VectorXd& rms, const Eigen::VectorXd& mean_abs)
{
  json out = json::array();
  for (int j = 0; j < model.num_joints(); ++j)
    out.push_back({{"joint", model.joint(j).name}, {"rms", rms(j)}, {"mean_abs", mean_abs(j)}});
  return out;
}

// Per joint residual statistics of Y pi - tau.
void residual_stats(const IdentDataset& d, const Eigen::VectorXd& pi, Eigen::VectorXd& rms,
                    Eigen::VectorXd& mean_abs)
{
  const int n = d.num_joints();
  const Eigen::VectorXd r = d.Y * pi - d.tau;
  const Eigen::Index N = r.size() / n;
  const Eigen::Map<const Eigen::MatrixXd> per(r.data(), n, N);
  rms = (per.array().square().rowwise().sum() / static_cast<double>(N)).sqrt();
  mean_abs = per.array().abs().rowwise().sum() / static_cast<double>(N);
}

double infer_rate(const std::vector<IdentSample>& samples)
{
  if (samples.size() < 2)
    throw ParseError("dataset needs at least two samples", 0, "");
  const double dt = (samples.back().t - samples.front().t) / static_cast<double>(samples.size() - 1);
  if (!(dt > 0.0))
    throw ParseError("timestamps must increase", 0, "t");
  return 1.0 / dt;
}

}  // namespace

int cmd_identify(const IdentifyOptions& options)
{
  RobotModel model = [&] {
    try {
      return load_identification_model(options.model);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "wbc identify: %s\n", e.what());
      std::exit(kExitInput);
    }
  }();
  if (model.floating_base()) {
    std::fprintf(stderr, "wbc identify: model '%s' has a floating base\n", model.name().c_str());
    return kExitInput;
  }

  json report{{"model", model.name()}, {"mode", options.mode}};
  const Eigen::VectorXd pi_true = parameter_vector(model);
  const int friction_offset = 10 * model.num_links();
  IdentDataset data;
  FourierTrajectory traj;

  try {
    if (options.mode == "dataset") {
      if (options.data.empty()) {
        std::fprintf(stderr, "wbc identify: dataset mode needs --data\n");
        return kExitInput;
      }
      std::ifstream in(options.data);
      if (!in)
        throw ParseError("cannot open '" + options.data + "'", 0, "");
      std::vector<IdentSample> samples = read_dataset_csv(in, model.num_joints());
      const double rate = infer_rate(samples);
      data = stack_regressor(model, std::move(samples), rate);
    } else {
      const ExcitationLimits limits = ExcitationLimits::from_model(model);
      if (!options.trajectory.empty()) {
        traj = load_trajectory(read_text_file(options.trajectory));
      } else {
        ExcitationOptions eo;
        eo.evaluations_per_start = options.evaluations;
        eo.seed = options.seed;
        log(1, "optimizing the excitation trajectory");
        const ExcitationResult ex = optimize_excitation(model, limits, eo);
        traj = ex.trajectory;
        report["excitation"] = {{"condition", ex.condition},
                                {"best_start_condition", ex.initial_condition},
                                {"evaluations", ex.evaluations}};
      }
      data = stack_regressor(model, traj, options.rate, options.duration, limits);
      synthesize_torques(data, pi_true, options.noise, options.seed);
      report["noise_sigma"] = options.noise;
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "wbc identify: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "wbc identify: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wbc identify: %s\n", e.what());
    return kExitFailure;
  }

  if (options.filter_cutoff > 0.0) {
    filter_velocities(data, model, options.filter_cutoff);
    report["velocity_filter_hz"] = options.filter_cutoff;
  }

  const BaseParameters base = structural_base_parameters(model);
  EstimationOptions eo;
  eo.mode = EstimationMode::kBase;
  eo.friction = !options.no_friction;
  Estimate est;
  try {
    est = estimate_parameters(data, model, eo, &base);
  } catch (const IdentificationError& e) {
    std::fprintf(stderr, "wbc identify: %s\n", e.what());
    report["error"] = e.what();
    std::printf("%s\n", report.dump(2).c_str());
    return kExitFailure;
  }

  report["samples"] = data.samples.size();
  report["sample_rate_hz"] = data.sample_rate;
  report["parameters"] = parameter_count(model);
  report["base_dimension"] = base.dimension;
  report["regressor_condition"] = regressor_condition(data.Y, base);
  report["friction_estimated"] = eo.friction;
  report["identified"] = {{"base_parameters", to_std(est.params)},
                          {"residuals", per_joint(model, est.rms, est.mean_abs)},
                          {"max_mean_abs", est.mean_abs.maxCoeff()}};

  // Model parameters without friction against the measured torques.
  Eigen::VectorXd pi_cad = pi_true;
  pi_cad.tail(pi_cad.size() - friction_offset).setZero();
  Eigen::VectorXd rms, mean_abs;
  residual_stats(data, pi_cad, rms, mean_abs);
  report["model_without_friction"] = {{"residuals", per_joint(model, rms, mean_abs)},
                                      {"max_mean_abs", mean_abs.maxCoeff()}};

  if (options.mode == "synth") {
    const Eigen::VectorXd truth = base.project(pi_true);
    Eigen::VectorXd e = est.params, t = truth;
    if (!eo.friction) {
      // Compare only the inertial combinations that were estimated.
      for (int k = 0; k < base.dimension; ++k)
        if (base.independent[k] >= friction_offset)
          e(k) = t(k) = 0.0;
    }
    report["base_relative_error"] = relative_error(e, t);
  }

  if (!options.out_dir.empty()) {
    try {
      fs::create_directories(options.out_dir);
      const fs::path dir(options.out_dir);
      std::ofstream csv(dir / "dataset.csv");
      write_dataset_csv(data, csv);
      if (options.mode == "synth")
        std::ofstream(dir / "trajectory.yaml") << trajectory_to_yaml(traj);
      std::ofstream(dir / "identify_report.json") << report.dump(2) << '\n';
      report["outputs"] = {(dir / "dataset.csv").string(), (dir / "identify_report.json").string()};
    } catch (const std::exception& e) {
      std::fprintf(stderr, "wbc identify: %s\n", e.what());
      return kExitFailure;
    }
  }
  std::printf("%s\n", report.dump(2).c_str());
  return kExitOk;
}

}  // namespace wbc::cli
