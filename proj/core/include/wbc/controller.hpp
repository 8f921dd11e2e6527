#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wbc/balance.hpp"

namespace wbc {

/// Controller settings. Per-joint entries left empty are taken from the model.
struct ControllerConfig
{
  HierarchyConfig hierarchy;
  double k_f = 0.8;
  double k_qdot = 2.0;
  double qdot_star = kDefaultFrictionBand;
  double leak = 0.999;
  Eigen::VectorXd k_i;
  Eigen::VectorXd coulomb;
  Eigen::VectorXd viscous;
  /// Sole half-extents [lx-, lx+, ly-, ly+] applied to every contact.
  std::optional<Eigen::Vector4d> sole;
  bool warm_start = true;

  JointControlParams joint_params(const RobotModel& model) const;
};

/// Parses a controller document:
///
///   gains:
///     foot:  {kp: 400, kd: 40}
///     com:   {kp: 100, kd: 20}
///     torso: {kp: 100, kd: 20}
///   cop_margin: 0.0
///   mu: 0.6
///   safe_region_scale: 0.8
///   zmp_source: measured        # or optimized
///   zmp_min_force: 20
///   force_weight: 1.0
///   standing_height_offset: 0.86  # optional
///   sole: [0.12, 0.12, 0.06, 0.06]
///   warm_start: true
///   joint_control:
///     k_f: 0.8
///     k_qdot: 2.0
///     qdot_star: 0.05
///     leak: 0.999
///     k_i: [...]                  # optional, per joint
///     coulomb: [...]
///     viscous: [...]
///
/// Every key is optional.
ControllerConfig load_controller_config(const std::string& text);
ControllerConfig load_controller_config_file(const std::string& path);

/// Applies the sole override of a controller config to a model.
RobotModel with_sole_override(const RobotModel& model, const ControllerConfig& config);

struct TickTiming
{
  double planner = 0.0;  // seconds
  double build = 0.0;
  double solve = 0.0;
  double qp = 0.0;
  double projection = 0.0;
  double command = 0.0;
  double total = 0.0;
};

struct TickOutput
{
  Eigen::VectorXd current;
  JointCommand command;
  WbcSolution solution;
  References refs;
  std::vector<bool> contact;
  std::vector<Zmp> measured_zmp;
  std::vector<Zmp> optimized_zmp;
  TickTiming timing;
  bool degraded = false;
  double max_violation = 0.0;  // largest D x - f over all levels
};

/// One control loop: planner, hierarchy, hQP and joint-level law.
class BalanceController
{
public:
  BalanceController(const RobotModel& model, ControllerConfig config);

  /// Clears the planner and integrator state.
  void reset(const RobotState& state);

  /// `wrenches` are the measured sole wrenches in sole coordinates.
  TickOutput tick(const RobotState& state, const std::vector<Vector6d>& wrenches, double dt);

  const RobotModel& model() const { return model_; }
  const ControllerConfig& config() const { return config_; }
  const JointControlParams& joint_params() const { return joint_; }

private:
  RobotModel model_;
  ControllerConfig config_;
  JointControlParams joint_;
  HqpSolver solver_;
  std::optional<References> refs_;
  std::vector<bool> last_contact_;
  std::vector<Zmp> last_optimized_zmp_;
};

}  // namespace wbc
