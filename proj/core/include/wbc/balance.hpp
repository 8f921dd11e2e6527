#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wbc/dynamics.hpp"
#include "wbc/hqp.hpp"
#include "wbc/model.hpp"

namespace wbc {

/// Sole frame pose and velocity ([angular; linear], world axes).
struct FootReference
{
  Transform pose;
  Vector6d velocity = Vector6d::Zero();
};

struct References
{
  std::vector<FootReference> foot;               // one per contact
  Eigen::Vector3d com_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d com_velocity = Eigen::Vector3d::Zero();
  Eigen::Matrix3d torso_orientation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d torso_angular_velocity = Eigen::Vector3d::Zero();
  std::vector<Vector6d> force;                   // [moment; force] at the sole center, world axes
  double standing_height_offset = 0.0;
  bool contact_lost = false;                     // no foot in contact, references held
};

struct TaskGains
{
  double kp = 0.0;  // 1/s^2
  double kd = 0.0;  // 1/s
};

enum class ZmpSource
{
  kMeasured,
  kOptimized,
};

struct HierarchyConfig
{
  TaskGains foot{400.0, 40.0};
  TaskGains com{100.0, 20.0};
  TaskGains torso{100.0, 20.0};
  double cop_margin = 0.0;         // m, shrinks the sole rectangle in the CoP rows
  double mu = 0.6;                 // friction pyramid coefficient
  double safe_region_scale = 0.8;  // fraction of the sole half-extents
  ZmpSource zmp_source = ZmpSource::kMeasured;
  double zmp_min_force = 20.0;     // N, below this the ZMP is not reliable
  double force_weight = 1.0;       // scale of the force-reference rows in the lowest level
  /// CoM height above the mean foot height. Unset: taken from the first state.
  std::optional<double> standing_height_offset;

  void validate() const;
};

struct Zmp
{
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  bool valid = false;
};

/// ZMP of a wrench [moment; force] given in the sole frame (z up):
/// p_x = -tau_y / f_z, p_y = tau_x / f_z. Invalid when f_z <= min_force.
Zmp measured_zmp(const Vector6d& wrench, double min_force = 20.0);

/// Wrench about the sole center expressed in sole coordinates.
Vector6d to_sole_frame(const Transform& sole, const Vector6d& world_wrench);

/// Whether p lies in the sole rectangle scaled by `scale`.
bool inside_sole(const ContactParams& contact, const Eigen::Vector2d& p, double scale = 1.0,
                 double tol = 0.0);

/// Task planner. A foot whose ZMP lies in its safe region gets its pose
/// and velocity references reset to the current state; other feet keep the
/// previous references. CoM and force references follow from the feet.
References plan_references(const RobotModel& model, const RobotState& state,
                           const std::vector<Zmp>& zmp, const std::vector<bool>& contact,
                           const HierarchyConfig& config, const References* previous);

/// Number of optimization variables: nv accelerations and 6 per contact.
int hierarchy_variables(const RobotModel& model);

/// Four priority levels over x = [qdd; F]:
///   1. floating-base dynamics, torque limits
///   2. foot accelerations, CoP / friction pyramid / unilateral rows
///   3. CoM acceleration through the linear centroidal momentum
///   4. torso angular acceleration and contact force references
/// A foot without contact has its wrench pinned to zero in level 1 and no
/// level-2 constraint rows.
std::vector<Level> build_hierarchy(const RobotModel& model, const RobotState& state,
                                   const References& refs, const HierarchyConfig& config,
                                   const std::vector<bool>& contact);

struct WbcSolution
{
  Eigen::VectorXd qdd_opt;
  Eigen::VectorXd F_opt;    // 6 per contact, [moment; force] world axes
  Eigen::VectorXd tau_opt;  // actuated joints
  HqpSolution diagnostics;
};

/// tau = S_a (M qdd + h - J_c' F).
Eigen::VectorXd extract_torque(const RobotModel& model, const RobotState& state,
                               const Eigen::VectorXd& qdd_opt, const Eigen::VectorXd& F_opt);

WbcSolution make_solution(const RobotModel& model, const RobotState& state, HqpSolution hqp);

struct JointControlParams
{
  Eigen::VectorXd k_i;          // A per N*m
  double k_f = 0.8;             // friction compensation fraction
  Eigen::VectorXd coulomb;      // N*m
  Eigen::VectorXd viscous;      // N*m*s/rad
  double qdot_star = kDefaultFrictionBand;
  double k_qdot = 2.0;          // N*m*s/rad
  double leak = 0.999;          // per tick
  Eigen::VectorXd velocity_limit;
  Eigen::VectorXd qdot_des;     // integrator state

  /// Parameters taken from the model's actuator and friction data.
  static JointControlParams from_model(const RobotModel& model);
  void reset(const Eigen::VectorXd& qdot);
  void validate() const;
};

Eigen::VectorXd friction_compensation(const Eigen::VectorXd& qdot_des, const JointControlParams& params);

struct JointCommand
{
  Eigen::VectorXd current;
  Eigen::VectorXd qdot_des;
  Eigen::VectorXd tau_friction;
  Eigen::VectorXd tau_velocity;
};

/// Advances the desired-velocity integrator and returns
///   i = k_i (tau_opt + k_f tau_f(qdot_des) + k_qdot (qdot_des - qdot)).
JointCommand joint_command(const Eigen::VectorXd& tau_opt, const Eigen::VectorXd& qdd_opt,
                           const RobotState& state, JointControlParams& params, double dt);

}  // namespace wbc
