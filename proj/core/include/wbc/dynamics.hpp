#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "wbc/model.hpp"
#include "wbc/spatial.hpp"

namespace wbc {

/// Link poses and velocities for one robot state.
struct Kinematics
{
  std::vector<Transform> pose;      // world pose of each link
  std::vector<Transform> local;     // pose of each link in its parent link (or world)
  std::vector<Vector6d> velocity;   // spatial velocity in link coordinates
};

Kinematics forward_kinematics(const RobotModel& model, const RobotState& state);

Transform frame_pose(const RobotModel& model, const Kinematics& kin, const FrameRef& frame);

/// Frame velocity as [angular velocity; velocity of the frame origin], both
/// in world axes. The same representation is used by frame_jacobian and
/// jdot_qdot, so that J*dq and J*ddq + jdot_qdot are directly comparable
/// with world-frame references.
Vector6d frame_velocity(const RobotModel& model, const Kinematics& kin, const FrameRef& frame);

/// 6 x nv Jacobian, angular rows first.
Matrix6Xd frame_jacobian(const RobotModel& model, const Kinematics& kin, const FrameRef& frame);
Matrix6Xd frame_jacobian(const RobotModel& model, const RobotState& state, const FrameRef& frame);

/// Frame acceleration obtained with ddq = 0 (angular acceleration and
/// classical acceleration of the origin, world axes).
Vector6d jdot_qdot(const RobotModel& model, const Kinematics& kin, const FrameRef& frame);
Vector6d jdot_qdot(const RobotModel& model, const RobotState& state, const FrameRef& frame);

/// Wrench [moment about the frame origin; force] in world axes acting on the robot.
struct ExternalWrench
{
  FrameRef frame;
  Vector6d wrench = Vector6d::Zero();
};

/// Recursive Newton-Euler inverse dynamics: M ddq + h - sum J^T F_ext.
Eigen::VectorXd rnea(const RobotModel& model, const RobotState& state, const Eigen::VectorXd& qdd,
                     std::span<const ExternalWrench> external = {}, bool with_gravity = true);

/// Joint-space inertia matrix by the composite-rigid-body algorithm.
Eigen::MatrixXd mass_matrix(const RobotModel& model, const RobotState& state);

/// Coriolis, centrifugal and gravity terms combined (h = C + G).
Eigen::VectorXd nonlinear_effects(const RobotModel& model, const RobotState& state);
Eigen::VectorXd gravity_vector(const RobotModel& model, const RobotState& state);

struct SelectionMatrices
{
  Eigen::MatrixXd floating;  // 6 x nv, [I 0]
  Eigen::MatrixXd actuated;  // n x nv, [0 I]
};
SelectionMatrices selection_matrices(const RobotModel& model);

/// Centroidal momentum map: A * v is the spatial momentum about the CoM in
/// world axes (angular first); adot_qdot is its rate of change at ddq = 0.
struct CentroidalMatrix
{
  Matrix6Xd A;
  Vector6d adot_qdot = Vector6d::Zero();
};
CentroidalMatrix centroidal_momentum(const RobotModel& model, const RobotState& state);

struct ComState
{
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double mass = 0.0;
};
ComState center_of_mass(const RobotModel& model, const RobotState& state);

/// Joint velocity below which Coulomb friction is ramped linearly.
inline constexpr double kDefaultFrictionBand = 0.05;

/// Coulomb-viscous friction torque with a linear band |qdot| < band:
///   coulomb + viscous (qdot - band)      for qdot >= band
///   qdot * coulomb / band                 inside the band
///   -coulomb + viscous (qdot + band)     for qdot <= -band
double friction_torque(double qdot, double coulomb, double viscous, double band);
/// The two coefficient functions of friction_torque: (coulomb part, viscous part).
Eigen::Vector2d friction_basis(double qdot, double band);

/// Identification regressor Y with Y * pi = rnea + joint friction, columns
/// ordered [10 per link (m, m c, I_o) | 2 per joint (coulomb, viscous)].
Eigen::MatrixXd regressor(const RobotModel& model, const RobotState& state,
                          const Eigen::VectorXd& qdd, double friction_band = kDefaultFrictionBand);

int parameter_count(const RobotModel& model);
/// Parameter vector of the model in regressor column order.
Eigen::VectorXd parameter_vector(const RobotModel& model);

}  // namespace wbc
