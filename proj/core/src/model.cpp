#include "wbc/model.hpp"

#include <cmath>
#include <deque>
#include <set>

#include <Eigen/Eigenvalues>

namespace wbc {

namespace {

constexpr const char* kWorld = "world";

[[noreturn]] void fail(const std::string& what)
{
  throw ModelError(what);
}

void check_link(const LinkParams& link)
{
  const std::string where = "link '" + link.name + "': ";
  if (!(link.mass > 0.0))
    fail(where + "mass must be positive");
  if (!link.com.allFinite() || !link.inertia.allFinite())
    fail(where + "non-finite inertial parameters");
  if ((link.inertia - link.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    fail(where + "inertia must be symmetric");

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> origin_eig(link.inertia);
  const double scale = std::max(1.0, link.inertia.cwiseAbs().maxCoeff());
  if (origin_eig.eigenvalues().minCoeff() < -1e-12 * scale)
    fail(where + "inertia must be positive semi-definite");

  // Shift to the center of mass: I_c = I_o - m (|c|^2 I - c c^T).
  const Eigen::Matrix3d at_com =
      link.inertia - link.mass * (link.com.squaredNorm() * Eigen::Matrix3d::Identity() -
                                  link.com * link.com.transpose());
  const Eigen::Vector3d principal =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(at_com).eigenvalues();
  const double tol = 1e-9 * std::max(1e-6, principal.cwiseAbs().maxCoeff());
  if (principal.minCoeff() < -tol)
    fail(where + "inertia about the center of mass is not positive semi-definite");
  for (int i = 0; i < 3; ++i) {
    const double others = principal((i + 1) % 3) + principal((i + 2) % 3);
    if (principal(i) > others + tol)
      fail(where + "principal moments violate the triangle inequality");
  }
}

void check_joint(const JointParams& joint)
{
  const std::string where = "joint '" + joint.name + "': ";
  if (std::abs(joint.axis.norm() - 1.0) > 1e-12)
    fail(where + "axis must have unit norm");
  if (!(joint.torque_min < joint.torque_max))
    fail(where + "torque_min must be below torque_max");
  if (!(joint.position_min < joint.position_max))
    fail(where + "position_min must be below position_max");
  if (!(joint.velocity_limit > 0.0))
    fail(where + "velocity limit must be positive");
  if (!(joint.gear_ratio >= 1.0))
    fail(where + "gear_ratio must be at least 1");
  if (!(joint.current_torque_coeff > 0.0))
    fail(where + "current_torque_coeff must be positive");
  if (joint.friction.coulomb < 0.0 || joint.friction.viscous < 0.0)
    fail(where + "friction coefficients must be non-negative");
}

}  // namespace

RobotModel::RobotModel(ModelDescription description) : desc_(std::move(description))
{
  validate();
  build_topology();
}

void RobotModel::validate() const
{
  if (desc_.links.empty())
    fail("model '" + desc_.name + "' has no links");
  if (!desc_.gravity.allFinite())
    fail("gravity must be finite");

  std::set<std::string> names;
  for (const auto& link : desc_.links) {
    if (link.name.empty() || link.name == kWorld)
      fail("invalid link name '" + link.name + "'");
    if (!names.insert(link.name).second)
      fail("link '" + link.name + "': duplicate name");
    check_link(link);
  }

  std::set<std::string> joint_names;
  std::set<std::string> children;
  for (const auto& joint : desc_.joints) {
    if (!joint_names.insert(joint.name).second)
      fail("joint '" + joint.name + "': duplicate name");
    check_joint(joint);
    const std::string where = "joint '" + joint.name + "': ";
    if (joint.parent != kWorld && !names.count(joint.parent))
      fail(where + "unknown parent link '" + joint.parent + "'");
    if (!names.count(joint.child))
      fail(where + "unknown child link '" + joint.child + "'");
    if (joint.parent == joint.child)
      fail(where + "parent and child are the same link");
    if (!children.insert(joint.child).second)
      fail(where + "link '" + joint.child + "' already has an inbound joint");
    if (desc_.floating_base && joint.parent == kWorld)
      fail(where + "floating-base models cannot attach joints to the world");
  }

  if (desc_.floating_base) {
    int roots = 0;
    for (const auto& link : desc_.links)
      roots += children.count(link.name) ? 0 : 1;
    if (roots != 1)
      fail("floating-base model must have exactly one root link, found " + std::to_string(roots));
  } else {
    for (const auto& link : desc_.links)
      if (!children.count(link.name))
        fail("link '" + link.name + "': no inbound joint in a fixed-base model");
  }

  for (const auto& c : desc_.contacts) {
    const std::string where = "contact '" + c.name + "': ";
    if (!names.count(c.link))
      fail(where + "unknown link '" + c.link + "'");
    if (!(c.lx_minus > 0 && c.lx_plus > 0 && c.ly_minus > 0 && c.ly_plus > 0))
      fail(where + "sole half-extents must be positive");
    if (!(c.mu > 0))
      fail(where + "friction coefficient must be positive");
  }
}

void RobotModel::build_topology()
{
  const int nl = num_links();
  parent_link_.assign(nl, -1);
  inbound_joint_.assign(nl, -1);
  joint_origin_.resize(desc_.joints.size());
  inertia_.resize(nl);

  for (int i = 0; i < nl; ++i) {
    const auto& l = desc_.links[i];
    inertia_[i] = SpatialInertia::from_params(l.mass, l.com, l.inertia);
    total_mass_ += l.mass;
  }

  std::vector<std::vector<int>> child_joints(nl);
  std::vector<int> world_joints;
  for (int j = 0; j < num_joints(); ++j) {
    const auto& joint = desc_.joints[j];
    joint_origin_[j] = Transform::from_xyz_rpy(joint.origin_xyz, joint.origin_rpy);
    const int child = link_index(joint.child);
    inbound_joint_[child] = j;
    if (joint.parent == kWorld) {
      world_joints.push_back(j);
    } else {
      const int parent = link_index(joint.parent);
      parent_link_[child] = parent;
      child_joints[parent].push_back(j);
    }
  }

  std::deque<int> queue;
  if (desc_.floating_base) {
    for (int i = 0; i < nl; ++i)
      if (inbound_joint_[i] < 0)
        root_link_ = i;
    queue.push_back(root_link_);
  } else {
    for (int j : world_joints)
      queue.push_back(link_index(desc_.joints[j].child));
    root_link_ = queue.empty() ? -1 : queue.front();
  }

  std::vector<bool> seen(nl, false);
  while (!queue.empty()) {
    const int link = queue.front();
    queue.pop_front();
    if (seen[link])
      fail("link '" + desc_.links[link].name + "': kinematic loop");
    seen[link] = true;
    order_.push_back(link);
    for (int j : child_joints[link])
      queue.push_back(link_index(desc_.joints[j].child));
  }
  for (int i = 0; i < nl; ++i)
    if (!seen[i])
      fail("link '" + desc_.links[i].name + "': not connected to the root (kinematic loop?)");
}

int RobotModel::link_index(const std::string& name) const
{
  for (int i = 0; i < num_links(); ++i)
    if (desc_.links[i].name == name)
      return i;
  return -1;
}

int RobotModel::joint_index(const std::string& name) const
{
  for (int j = 0; j < num_joints(); ++j)
    if (desc_.joints[j].name == name)
      return j;
  return -1;
}

int RobotModel::contact_index(const std::string& name) const
{
  for (std::size_t c = 0; c < desc_.contacts.size(); ++c)
    if (desc_.contacts[c].name == name)
      return static_cast<int>(c);
  return -1;
}

FrameRef RobotModel::frame(const std::string& name) const
{
  if (name == kWorld)
    return {};
  if (const int c = contact_index(name); c >= 0)
    return contact_frame(c);
  if (const int l = link_index(name); l >= 0)
    return {l, Transform::identity()};
  throw ModelError("unknown frame '" + name + "'");
}

FrameRef RobotModel::contact_frame(int contact) const
{
  const auto& c = desc_.contacts.at(contact);
  return {link_index(c.link), Transform::from_xyz_rpy(c.offset_xyz, c.offset_rpy)};
}

Eigen::VectorXd RobotModel::torque_min() const
{
  Eigen::VectorXd t(num_joints());
  for (int j = 0; j < num_joints(); ++j)
    t(j) = desc_.joints[j].torque_min;
  return t;
}

Eigen::VectorXd RobotModel::torque_max() const
{
  Eigen::VectorXd t(num_joints());
  for (int j = 0; j < num_joints(); ++j)
    t(j) = desc_.joints[j].torque_max;
  return t;
}

RobotState RobotState::zero(const RobotModel& model)
{
  RobotState s;
  s.q = Eigen::VectorXd::Zero(model.num_joints());
  s.dq = Eigen::VectorXd::Zero(model.num_joints());
  return s;
}

Eigen::VectorXd RobotState::velocity(const RobotModel& model) const
{
  Eigen::VectorXd v(model.nv());
  if (model.floating_base())
    v.head<6>() = base_twist;
  v.tail(model.num_joints()) = dq;
  return v;
}

void RobotState::set_velocity(const RobotModel& model, const Eigen::VectorXd& v)
{
  if (model.floating_base())
    base_twist = v.head<6>();
  dq = v.tail(model.num_joints());
}

void RobotState::check(const RobotModel& model) const
{
  if (q.size() != model.num_joints() || dq.size() != model.num_joints())
    throw ModelError("state dimension mismatch: expected " + std::to_string(model.num_joints()) +
                     " joints, got q=" + std::to_string(q.size()) +
                     " dq=" + std::to_string(dq.size()));
  if (model.floating_base() && std::abs(base_orientation.norm() - 1.0) > 1e-9)
    throw ModelError("base orientation quaternion is not unit norm");
}

RobotState RobotState::integrated(const RobotModel& model, const Eigen::VectorXd& v,
                                  double dt) const
{
  RobotState out = *this;
  if (model.floating_base()) {
    const Eigen::Matrix3d R = base_orientation.toRotationMatrix();
    out.base_position = base_position + R * v.segment<3>(3) * dt;
    const Eigen::Matrix3d Rn = R * exp_so3(v.head<3>() * dt);
    out.base_orientation = Eigen::Quaterniond(Rn).normalized();
  }
  out.q = q + v.tail(model.num_joints()) * dt;
  return out;
}

}  // namespace wbc
