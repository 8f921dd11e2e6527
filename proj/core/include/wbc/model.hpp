#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "wbc/spatial.hpp"

namespace wbc {

/// Raised when a robot description violates a model invariant. The message
/// names the offending link, joint or contact.
class ModelError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct LinkParams
{
  std::string name;
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  /// Rotational inertia about the link frame origin.
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
};

struct JointFriction
{
  double coulomb = 0.0;  // N·m
  double viscous = 0.0;  // N·m·s/rad
};

struct JointParams
{
  std::string name;
  std::string parent;  // link name, or "world"
  std::string child;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d origin_xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d origin_rpy = Eigen::Vector3d::Zero();
  double position_min = -M_PI;
  double position_max = M_PI;
  double velocity_limit = 10.0;
  double torque_min = -100.0;
  double torque_max = 100.0;
  double gear_ratio = 1.0;
  /// k_i, amperes per N·m.
  double current_torque_coeff = 1.0;
  JointFriction friction;
};

/// Sole-center frame with a rectangular support area. Half-extents are
/// measured from the frame origin along -x, +x, -y, +y.
struct ContactParams
{
  std::string name;
  std::string link;
  Eigen::Vector3d offset_xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d offset_rpy = Eigen::Vector3d::Zero();
  double lx_minus = 0.12;
  double lx_plus = 0.12;
  double ly_minus = 0.06;
  double ly_plus = 0.06;
  double mu = 0.6;
};

/// Raw robot description in document order. Numbers are kept exactly as
/// given so that a description serializes back to an identical document.
struct ModelDescription
{
  std::string name = "robot";
  bool floating_base = false;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
  std::vector<LinkParams> links;
  std::vector<JointParams> joints;
  std::vector<ContactParams> contacts;
};

/// A frame rigidly attached to a link (link == -1 denotes the world).
struct FrameRef
{
  int link = -1;
  Transform offset;
};

/// Validated kinematic tree. Immutable once constructed.
///
/// Generalized velocity layout: for floating-base models the first six
/// entries are the base twist in base-body coordinates (angular first),
/// followed by one entry per joint in document order.
class RobotModel
{
public:
  explicit RobotModel(ModelDescription description);

  const ModelDescription& description() const { return desc_; }
  const std::string& name() const { return desc_.name; }
  bool floating_base() const { return desc_.floating_base; }
  const Eigen::Vector3d& gravity() const { return desc_.gravity; }

  int num_links() const { return static_cast<int>(desc_.links.size()); }
  int num_joints() const { return static_cast<int>(desc_.joints.size()); }
  int num_actuated() const { return num_joints(); }
  int nv() const { return base_dofs() + num_joints(); }
  int base_dofs() const { return desc_.floating_base ? 6 : 0; }

  const LinkParams& link(int i) const { return desc_.links[i]; }
  const JointParams& joint(int j) const { return desc_.joints[j]; }
  const std::vector<ContactParams>& contacts() const { return desc_.contacts; }
  double total_mass() const { return total_mass_; }

  int link_index(const std::string& name) const;
  int joint_index(const std::string& name) const;
  int contact_index(const std::string& name) const;

  /// Resolves a link name, contact name or "world".
  FrameRef frame(const std::string& name) const;
  FrameRef contact_frame(int contact) const;

  // Topology, derived at construction.
  int root_link() const { return root_link_; }
  /// Parent link of each link, -1 when attached to the world (or floating).
  int parent_link(int link) const { return parent_link_[link]; }
  /// Joint whose child is `link`, -1 for the floating root.
  int inbound_joint(int link) const { return inbound_joint_[link]; }
  /// Links ordered so that every parent precedes its children.
  const std::vector<int>& topological_order() const { return order_; }
  /// Pose of the joint frame in the parent link frame.
  const Transform& joint_origin(int joint) const { return joint_origin_[joint]; }
  const SpatialInertia& link_inertia(int link) const { return inertia_[link]; }
  /// Generalized velocity index of a joint.
  int joint_dof(int joint) const { return base_dofs() + joint; }

  Eigen::VectorXd torque_min() const;
  Eigen::VectorXd torque_max() const;

private:
  void validate() const;
  void build_topology();

  ModelDescription desc_;
  double total_mass_ = 0.0;
  int root_link_ = -1;
  std::vector<int> parent_link_;
  std::vector<int> inbound_joint_;
  std::vector<int> order_;
  std::vector<Transform> joint_origin_;
  std::vector<SpatialInertia> inertia_;
};

/// Generalized position and velocity.
struct RobotState
{
  Eigen::Vector3d base_position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();
  /// Base twist in body coordinates, angular first.
  Vector6d base_twist = Vector6d::Zero();
  Eigen::VectorXd q;
  Eigen::VectorXd dq;

  static RobotState zero(const RobotModel& model);

  /// Full generalized velocity (base twist first for floating models).
  Eigen::VectorXd velocity(const RobotModel& model) const;
  void set_velocity(const RobotModel& model, const Eigen::VectorXd& v);

  Transform base_pose() const { return {base_orientation.toRotationMatrix(), base_position}; }

  /// Throws ModelError if dimensions or the quaternion norm are invalid.
  void check(const RobotModel& model) const;

  /// Configuration reached by following velocity v for time dt. The base
  /// orientation is advanced with the exponential map of the body angular
  /// velocity.
  RobotState integrated(const RobotModel& model, const Eigen::VectorXd& v, double dt) const;
};

}  // namespace wbc
