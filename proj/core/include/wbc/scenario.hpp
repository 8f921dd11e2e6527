#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wbc/controller.hpp"
#include "wbc/sim.hpp"

namespace wbc {

enum class ScenarioType
{
  kFlatPush,
  kSeesaw,
  kMovingSupport,
  kCustom,
};

std::string to_string(ScenarioType type);
ScenarioType scenario_type_from_string(const std::string& name);

struct ScenarioConfig
{
  std::string name;
  ScenarioType type = ScenarioType::kCustom;
  double horizon = 5.0;  // s
  double dt = 1e-3;      // s, shared by control and physics
  unsigned seed = 1;
  std::string model_path;  // empty: built-in biped
  ControllerConfig controller;
  SimParams sim;
  std::vector<Impulse> impulses;
  std::vector<SupportProfile> supports;  // one per contact, empty: flat ground
  double com_height_fraction = 0.8;      // verdict threshold
  double initial_drop = 0.0;             // m, start this far above static penetration

  void validate() const;
};

/// Gains the built-in scenarios run with. Softer than the controller
/// defaults: the stiff defaults hyperextend a knee under the larger pushes.
ControllerConfig scenario_controller_config();

/// Built-in defaults of each scenario type on the built-in biped.
ScenarioConfig default_scenario(ScenarioType type);

/// Parses a scenario document. Paths inside it are resolved against
/// `base_dir`.
///
///   scenario: flat_push          # flat_push | seesaw | moving_support | custom
///   name: push_series
///   horizon: 13
///   dt: 0.001
///   seed: 1
///   model: ../models/walker3.yaml            # optional
///   controller: controller.yaml              # path or inline mapping
///   sim: {normal_stiffness: 1e5, normal_damping: 1e3, tangential_stiffness: 1e5,
///         tangential_damping: 1e3, joint_friction: true, friction_mismatch: 0.1,
///         velocity_noise: 0, initial_drop: 0}
///   impulses:                                # replaces the scenario defaults
///     - {time: 1.0, duration: 0.1, impulse: [8, 0, 0], link: torso, point: [0, 0, 0.3]}
///   supports:                                # one per contact, replaces the defaults
///     - {type: tilt, origin: [0, 0, 0],
///        keyframes: [{time: 1, roll: 0, pitch: 0}, {time: 3, roll: 6, pitch: 0}]}   # degrees
///     - {type: translate, axis: [1, 0, 0], amplitude: 0.2, omega: 2.5, phase: 0,
///        start: 1, ramp: 2}
///   verdict: {com_height_fraction: 0.8}
ScenarioConfig load_scenario(const std::string& text, const std::string& base_dir = "");
ScenarioConfig load_scenario_file(const std::string& path);

struct FootLog
{
  bool contact = false;
  int corners = 0;                           // corners touching the support
  Zmp measured_zmp;
  Zmp optimized_zmp;
  bool zmp_inside = true;                    // measured ZMP within the sole (or no contact)
  Vector6d wrench = Vector6d::Zero();        // measured, sole frame
  Vector6d force_opt = Vector6d::Zero();     // optimized, world axes
  double position_error = 0.0;               // foot task, m
  double orientation_error = 0.0;            // foot task, rad
  double surface_misalignment = 0.0;         // angle between sole and support normals, rad
};

struct TickRecord
{
  double time = 0.0;
  RobotState state;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Vector3d com_ref = Eigen::Vector3d::Zero();
  double com_height = 0.0;       // above the mean support height under the feet
  std::vector<double> residual;  // per level, norm of A x - b
  Eigen::VectorXd tau_opt;
  Eigen::VectorXd current;
  std::vector<FootLog> feet;
  TickTiming timing;
  bool degraded = false;
  double max_violation = 0.0;
};

struct ScenarioStats
{
  int ticks = 0;
  std::vector<double> residual_max;
  std::vector<double> residual_mean;
  double tick_mean = 0.0;  // s, full controller tick
  double tick_max = 0.0;
  double tick_p99 = 0.0;
  double qp_mean = 0.0;
  double projection_mean = 0.0;
  int violations = 0;                   // ticks with a hard-constraint violation or degraded solve
  int degraded_ticks = 0;
  double max_zmp_excursion = 0.0;       // s, longest run of ticks with a ZMP outside its sole
  double four_corner_fraction = 1.0;    // share of ticks with every foot in 4-corner contact
  double min_com_height_fraction = 1.0; // of the nominal height above the supports
  bool joint_limit_breach = false;
  double steady_foot_position_error = 0.0;
  double steady_foot_orientation_error = 0.0;
  double max_surface_misalignment = 0.0;
};

struct ScenarioResult
{
  std::string name;
  std::string verdict;  // balanced | fallen | diverged
  std::string message;
  double duration = 0.0;  // simulated seconds
  std::vector<TickRecord> records;
  ScenarioStats stats;

  bool balanced() const { return verdict == "balanced"; }
};

/// Runs the 1 kHz loop: measured wrenches -> controller tick -> plant step.
/// Stops early once the robot has fallen or the plant diverged.
ScenarioResult run_scenario(const ScenarioConfig& config);
ScenarioResult run_scenario(const ScenarioConfig& config, const RobotModel& model);

/// Model named by the config, or the built-in biped.
RobotModel scenario_model(const ScenarioConfig& config);

/// Starting state: nominal stance resting on the supports.
RobotState scenario_initial_state(const ScenarioConfig& config, const RobotModel& model);

ScenarioStats compute_stats(const std::vector<TickRecord>& records, const RobotModel& model,
                            double dt, double nominal_height);

/// One row per tick; the header names every column.
void write_log_csv(const ScenarioResult& result, const RobotModel& model, std::ostream& out);

}  // namespace wbc
