#pragma once

#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wbc/dynamics.hpp"
#include "wbc/model.hpp"

namespace wbc {

/// Pose of a support surface (z axis is the surface normal) and its
/// velocity [angular; linear of the surface frame origin], world axes.
struct SupportPose
{
  Transform pose;
  Vector6d velocity = Vector6d::Zero();

  /// Velocity of the surface material at world point x.
  Eigen::Vector3d point_velocity(const Eigen::Vector3d& x) const;
};

/// Orientation keyframe of a tilting support (angles in radians).
struct TiltKeyframe
{
  double time = 0.0;
  double roll = 0.0;   // about x
  double pitch = 0.0;  // about y
};

/// Kinematically prescribed support surface.
struct SupportProfile
{
  enum class Kind
  {
    kFlat,       // static plane through `origin`
    kTilt,       // rotation about `origin` following the keyframes
    kTranslate,  // sinusoidal translation along `axis`
    kNone,       // no surface under this contact
  };
  Kind kind = Kind::kFlat;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();

  std::vector<TiltKeyframe> keyframes;  // smooth interpolation between keyframes

  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double amplitude = 0.0;  // m
  double omega = 0.0;      // rad/s
  double phase = 0.0;      // rad
  double start = 0.0;      // s, motion begins
  double ramp = 0.0;       // s, amplitude fade-in

  SupportPose evaluate(double t) const;
};

/// Constant force on a point of a link over [start, start + duration).
struct Impulse
{
  double start = 0.0;
  double duration = 0.1;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();  // N, world axes
  std::string link;                                 // empty: root link
  Eigen::Vector3d point = Eigen::Vector3d::Zero();  // in link coordinates

  Eigen::Vector3d impulse() const { return force * duration; }
};

struct SimParams
{
  double normal_stiffness = 1e5;      // N/m per corner
  double normal_damping = 1e3;        // N*s/m per corner
  double tangential_stiffness = 1e5;  // N/m per corner
  double tangential_damping = 1e3;    // N*s/m per corner
  bool joint_friction = true;
  double friction_mismatch = 0.1;     // plant friction = (1 + mismatch) * model friction
  double friction_band = kDefaultFrictionBand;
  double velocity_noise = 0.0;        // std of measured joint velocity noise, rad/s
  unsigned seed = 1;
};

class SimulationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ContactPointState
{
  Eigen::Vector3d local = Eigen::Vector3d::Zero();   // corner in sole coordinates
  Eigen::Vector3d position = Eigen::Vector3d::Zero(); // world
  Eigen::Vector3d force = Eigen::Vector3d::Zero();    // on the robot, world axes
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();   // stiction anchor, support coordinates
  double penetration = 0.0;
  bool in_contact = false;
  bool slipping = false;

  /// Force the robot exerts on the support.
  Eigen::Vector3d support_reaction() const { return -force; }
};

struct ContactWrench
{
  Vector6d wrench = Vector6d::Zero();  // about the sole center, sole coordinates
  std::array<Eigen::Vector3d, 4> point_forces{};     // world axes
  std::array<Eigen::Vector3d, 4> point_positions{};  // world
  int corners_in_contact = 0;
};

/// Floating-base plant with penalty contact at the four sole corners of
/// every contact frame, each foot standing on its own prescribed support.
class World
{
public:
  /// Without explicit supports, floating-base models stand on flat ground
  /// at z = 0 and fixed-base models get no support surfaces.
  World(const RobotModel& model, const RobotState& initial, SimParams params = {},
        std::vector<SupportProfile> supports = {});

  /// Advances by dt with the given motor currents (one per joint).
  void step(const Eigen::VectorXd& currents, double dt);

  void add_impulse(const Impulse& impulse) { impulses_.push_back(impulse); }

  const RobotModel& model() const { return model_; }
  const RobotState& state() const { return state_; }
  double time() const { return time_; }
  const SimParams& params() const { return params_; }

  /// Ground-truth sole wrench and per-corner forces after the last step.
  ContactWrench contact_wrench(int foot) const;
  const std::vector<std::array<ContactPointState, 4>>& contact_points() const { return points_; }
  SupportPose support_pose(int foot) const;
  SupportPose support_pose(int foot, double t) const;

  /// State as seen by the controller (with optional velocity noise).
  RobotState measured_state();

  /// Joint torques applied by the motors in the last step.
  const Eigen::VectorXd& motor_torque() const { return motor_torque_; }

  /// Kinetic plus gravitational potential energy (potential zero at z = 0).
  double energy() const;

private:
  void update_contact_geometry(const Kinematics& kin);

  RobotModel model_;
  RobotState state_;
  SimParams params_;
  std::vector<SupportProfile> supports_;
  std::vector<Impulse> impulses_;
  std::vector<std::array<ContactPointState, 4>> points_;
  Eigen::VectorXd motor_torque_;
  double time_ = 0.0;
  std::mt19937 rng_;
};

/// Energy of a model state (kinetic plus potential with zero at z = 0).
double mechanical_energy(const RobotModel& model, const RobotState& state);

}  // namespace wbc
