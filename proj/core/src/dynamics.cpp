#include "wbc/dynamics.hpp"

#include <cmath>

namespace wbc {

namespace {

void check_dims(const RobotModel& model, const RobotState& state)
{
  state.check(model);
}

Vector6d joint_motion(const RobotModel& model, int joint)
{
  Vector6d s = Vector6d::Zero();
  s.head<3>() = model.joint(joint).axis;
  return s;
}

Transform joint_transform(const RobotModel& model, int joint, double q)
{
  Transform rot;
  rot.R = Eigen::AngleAxisd(q, model.joint(joint).axis).toRotationMatrix();
  return model.joint_origin(joint) * rot;
}

/// Link velocities and accelerations for given ddq and root acceleration.
struct MotionPass
{
  std::vector<Vector6d> acceleration;
};

MotionPass propagate_accelerations(const RobotModel& model, const RobotState& state,
                                   const Kinematics& kin, const Eigen::VectorXd* qdd,
                                   bool with_gravity)
{
  MotionPass out;
  out.acceleration.assign(model.num_links(), Vector6d::Zero());
  Vector6d world_acc = Vector6d::Zero();
  if (with_gravity)
    world_acc.tail<3>() = -model.gravity();

  for (int link : model.topological_order()) {
    const int j = model.inbound_joint(link);
    if (j < 0) {
      out.acceleration[link] = kin.local[link].motion_to_child(world_acc);
      if (qdd)
        out.acceleration[link] += qdd->head<6>();
      continue;
    }
    const int parent = model.parent_link(link);
    const Vector6d parent_acc = parent < 0 ? world_acc : out.acceleration[parent];
    const Vector6d s = joint_motion(model, j);
    const double dq = state.dq(j);
    Vector6d a = kin.local[link].motion_to_child(parent_acc) + cross_motion(kin.velocity[link], s * dq);
    if (qdd)
      a += s * (*qdd)(model.joint_dof(j));
    out.acceleration[link] = a;
  }
  return out;
}

}  // namespace

Kinematics forward_kinematics(const RobotModel& model, const RobotState& state)
{
  check_dims(model, state);
  const int nl = model.num_links();
  Kinematics kin;
  kin.pose.resize(nl);
  kin.local.resize(nl);
  kin.velocity.assign(nl, Vector6d::Zero());

  for (int link : model.topological_order()) {
    const int j = model.inbound_joint(link);
    if (j < 0) {
      kin.local[link] = state.base_pose();
      kin.pose[link] = kin.local[link];
      kin.velocity[link] = state.base_twist;
      continue;
    }
    const int parent = model.parent_link(link);
    kin.local[link] = joint_transform(model, j, state.q(j));
    kin.pose[link] = parent < 0 ? kin.local[link] : kin.pose[parent] * kin.local[link];
    const Vector6d parent_vel = parent < 0 ? Vector6d::Zero() : kin.velocity[parent];
    kin.velocity[link] = kin.local[link].motion_to_child(parent_vel) + joint_motion(model, j) * state.dq(j);
  }
  return kin;
}

Transform frame_pose(const RobotModel&, const Kinematics& kin, const FrameRef& frame)
{
  if (frame.link < 0)
    return frame.offset;
  return kin.pose[frame.link] * frame.offset;
}

Vector6d frame_velocity(const RobotModel& model, const Kinematics& kin, const FrameRef& frame)
{
  if (frame.link < 0)
    return Vector6d::Zero();
  const Vector6d local = frame.offset.motion_to_child(kin.velocity[frame.link]);
  const Eigen::Matrix3d R = frame_pose(model, kin, frame).R;
  Vector6d out;
  out.head<3>() = R * local.head<3>();
  out.tail<3>() = R * local.tail<3>();
  return out;
}

Matrix6Xd frame_jacobian(const RobotModel& model, const Kinematics& kin, const FrameRef& frame)
{
  Matrix6Xd J = Matrix6Xd::Zero(6, model.nv());
  if (frame.link < 0)
    return J;
  const Eigen::Vector3d p = frame_pose(model, kin, frame).p;
  for (int link = frame.link; link >= 0; link = model.parent_link(link)) {
    const int j = model.inbound_joint(link);
    const Transform& X = kin.pose[link];
    if (j < 0) {
      J.block<3, 3>(0, 0) = X.R;
      J.block<3, 3>(3, 0) = -skew(p - X.p) * X.R;
      J.block<3, 3>(3, 3) = X.R;
      continue;
    }
    const Eigen::Vector3d axis = X.R * model.joint(j).axis;
    const int col = model.joint_dof(j);
    J.block<3, 1>(0, col) = axis;
    J.block<3, 1>(3, col) = axis.cross(p - X.p);
  }
  return J;
}

Matrix6Xd frame_jacobian(const RobotModel& model, const RobotState& state, const FrameRef& frame)
{
  return frame_jacobian(model, forward_kinematics(model, state), frame);
}

Vector6d jdot_qdot(const RobotModel& model, const Kinematics& kin, const FrameRef& frame)
{
  if (frame.link < 0)
    return Vector6d::Zero();
  // Velocity-product accelerations only: ddq = 0, no gravity. The state is
  // only needed for dq, which is already folded into kin.velocity; rebuild
  // the joint rates from the link velocities.
  std::vector<Vector6d> acc(model.num_links(), Vector6d::Zero());
  for (int link : model.topological_order()) {
    const int j = model.inbound_joint(link);
    if (j < 0)
      continue;
    const int parent = model.parent_link(link);
    const Vector6d parent_vel = parent < 0 ? Vector6d::Zero() : kin.velocity[parent];
    const Vector6d parent_acc = parent < 0 ? Vector6d::Zero() : acc[parent];
    const Vector6d joint_vel = kin.velocity[link] - kin.local[link].motion_to_child(parent_vel);
    acc[link] = kin.local[link].motion_to_child(parent_acc) + cross_motion(kin.velocity[link], joint_vel);
  }
  const Vector6d a = frame.offset.motion_to_child(acc[frame.link]);
  const Vector6d v = frame.offset.motion_to_child(kin.velocity[frame.link]);
  const Eigen::Matrix3d R = frame_pose(model, kin, frame).R;
  Vector6d out;
  out.head<3>() = R * a.head<3>();
  out.tail<3>() = R * (a.tail<3>() + v.head<3>().cross(v.tail<3>()));
  return out;
}

Vector6d jdot_qdot(const RobotModel& model, const RobotState& state, const FrameRef& frame)
{
  return jdot_qdot(model, forward_kinematics(model, state), frame);
}

Eigen::VectorXd rnea(const RobotModel& model, const RobotState& state, const Eigen::VectorXd& qdd,
                     std::span<const ExternalWrench> external, bool with_gravity)
{
  if (qdd.size() != model.nv())
    throw ModelError("rnea: acceleration has size " + std::to_string(qdd.size()) + ", expected " +
                     std::to_string(model.nv()));
  const Kinematics kin = forward_kinematics(model, state);
  const MotionPass motion = propagate_accelerations(model, state, kin, &qdd, with_gravity);

  std::vector<Vector6d> force(model.num_links());
  for (int i = 0; i < model.num_links(); ++i) {
    const SpatialInertia& I = model.link_inertia(i);
    const Vector6d& v = kin.velocity[i];
    force[i] = I * motion.acceleration[i] + cross_force(v, I * v);
  }
  for (const ExternalWrench& ext : external) {
    if (ext.frame.link < 0)
      continue;
    const Transform& X = kin.pose[ext.frame.link];
    const Eigen::Vector3d origin = frame_pose(model, kin, ext.frame).p;
    const Eigen::Vector3d f = ext.wrench.tail<3>();
    const Eigen::Vector3d n = ext.wrench.head<3>() + (origin - X.p).cross(f);
    force[ext.frame.link].head<3>() -= X.R.transpose() * n;
    force[ext.frame.link].tail<3>() -= X.R.transpose() * f;
  }

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(model.nv());
  const auto& order = model.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int link = *it;
    const int j = model.inbound_joint(link);
    if (j < 0) {
      tau.head<6>() = force[link];
      continue;
    }
    tau(model.joint_dof(j)) = model.joint(j).axis.dot(force[link].head<3>());
    const int parent = model.parent_link(link);
    if (parent >= 0)
      force[parent] += kin.local[link].force_to_parent(force[link]);
  }
  return tau;
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const RobotState& state)
{
  const Kinematics kin = forward_kinematics(model, state);
  const int nl = model.num_links();
  std::vector<SpatialInertia> composite(nl);
  for (int i = 0; i < nl; ++i)
    composite[i] = model.link_inertia(i);
  const auto& order = model.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int parent = model.parent_link(*it);
    if (parent >= 0)
      composite[parent] += composite[*it].to_parent(kin.local[*it]);
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(model.nv(), model.nv());
  for (int link = 0; link < nl; ++link) {
    const int j = model.inbound_joint(link);
    Matrix6Xd F;
    int col = 0;
    if (j < 0) {
      F = composite[link].matrix();
      M.topLeftCorner<6, 6>() = F;
      continue;
    }
    col = model.joint_dof(j);
    F = composite[link] * joint_motion(model, j);
    M(col, col) = model.joint(j).axis.dot(F.col(0).head<3>());
    for (int child = link, parent = model.parent_link(link); parent >= 0;
         child = parent, parent = model.parent_link(parent)) {
      F.col(0) = kin.local[child].force_to_parent(F.col(0));
      const int pj = model.inbound_joint(parent);
      if (pj < 0) {
        M.block<6, 1>(0, col) = F.col(0);
        M.block<1, 6>(col, 0) = F.col(0).transpose();
      } else {
        const int row = model.joint_dof(pj);
        M(row, col) = model.joint(pj).axis.dot(F.col(0).head<3>());
        M(col, row) = M(row, col);
      }
    }
  }
  return M;
}

Eigen::VectorXd nonlinear_effects(const RobotModel& model, const RobotState& state)
{
  return rnea(model, state, Eigen::VectorXd::Zero(model.nv()));
}

Eigen::VectorXd gravity_vector(const RobotModel& model, const RobotState& state)
{
  RobotState still = state;
  still.base_twist.setZero();
  still.dq.setZero();
  return rnea(model, still, Eigen::VectorXd::Zero(model.nv()));
}

SelectionMatrices selection_matrices(const RobotModel& model)
{
  const int n = model.num_joints();
  const int nb = model.base_dofs();
  SelectionMatrices s;
  s.floating = Eigen::MatrixXd::Zero(nb, model.nv());
  s.floating.leftCols(nb).setIdentity();
  s.actuated = Eigen::MatrixXd::Zero(n, model.nv());
  s.actuated.rightCols(n).setIdentity();
  return s;
}

ComState center_of_mass(const RobotModel& model, const RobotState& state)
{
  const Kinematics kin = forward_kinematics(model, state);
  ComState c;
  for (int i = 0; i < model.num_links(); ++i) {
    const auto& link = model.link(i);
    const Transform& X = kin.pose[i];
    const Vector6d& v = kin.velocity[i];
    c.position += link.mass * X.act(link.com);
    c.velocity += link.mass * X.R * (v.tail<3>() + v.head<3>().cross(link.com));
    c.mass += link.mass;
  }
  c.position /= c.mass;
  c.velocity /= c.mass;
  return c;
}

CentroidalMatrix centroidal_momentum(const RobotModel& model, const RobotState& state)
{
  if (!model.floating_base())
    throw ModelError("centroidal_momentum requires a floating-base model");
  const Eigen::MatrixXd M = mass_matrix(model, state);
  const Eigen::VectorXd bias = rnea(model, state, Eigen::VectorXd::Zero(model.nv()), {}, false);
  const ComState com = center_of_mass(model, state);

  // Base-frame momentum rows transported to a world-aligned frame at the CoM.
  Transform base_in_com = state.base_pose();
  base_in_com.p -= com.position;

  CentroidalMatrix out;
  out.A.resize(6, model.nv());
  for (int c = 0; c < model.nv(); ++c)
    out.A.col(c) = base_in_com.force_to_parent(M.block<6, 1>(0, c));
  out.adot_qdot = base_in_com.force_to_parent(bias.head<6>());
  return out;
}

double friction_torque(double qdot, double coulomb, double viscous, double band)
{
  const Eigen::Vector2d phi = friction_basis(qdot, band);
  return coulomb * phi(0) + viscous * phi(1);
}

Eigen::Vector2d friction_basis(double qdot, double band)
{
  if (qdot >= band)
    return {1.0, qdot - band};
  if (qdot <= -band)
    return {-1.0, qdot + band};
  return {qdot / band, 0.0};
}

int parameter_count(const RobotModel& model)
{
  return 10 * model.num_links() + 2 * model.num_joints();
}

Eigen::VectorXd parameter_vector(const RobotModel& model)
{
  Eigen::VectorXd pi(parameter_count(model));
  for (int i = 0; i < model.num_links(); ++i)
    pi.segment<10>(10 * i) = model.link_inertia(i).to_vector();
  const int offset = 10 * model.num_links();
  for (int j = 0; j < model.num_joints(); ++j) {
    pi(offset + 2 * j) = model.joint(j).friction.coulomb;
    pi(offset + 2 * j + 1) = model.joint(j).friction.viscous;
  }
  return pi;
}

Eigen::MatrixXd regressor(const RobotModel& model, const RobotState& state,
                          const Eigen::VectorXd& qdd, double friction_band)
{
  if (qdd.size() != model.nv())
    throw ModelError("regressor: acceleration has size " + std::to_string(qdd.size()) +
                     ", expected " + std::to_string(model.nv()));
  const Kinematics kin = forward_kinematics(model, state);
  const MotionPass motion = propagate_accelerations(model, state, kin, &qdd, true);

  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(model.nv(), parameter_count(model));
  for (int link = 0; link < model.num_links(); ++link) {
    Matrix6x10d F = body_regressor(motion.acceleration[link], kin.velocity[link]);
    const int col = 10 * link;
    for (int current = link; current >= 0; current = model.parent_link(current)) {
      const int j = model.inbound_joint(current);
      if (j < 0)
        Y.block<6, 10>(0, col) = F;
      else
        Y.block<1, 10>(model.joint_dof(j), col) = model.joint(j).axis.transpose() * F.topRows<3>();
      if (model.parent_link(current) >= 0)
        for (int k = 0; k < 10; ++k)
          F.col(k) = kin.local[current].force_to_parent(F.col(k));
    }
  }
  const int offset = 10 * model.num_links();
  for (int j = 0; j < model.num_joints(); ++j)
    Y.block<1, 2>(model.joint_dof(j), offset + 2 * j) =
        friction_basis(state.dq(j), friction_band).transpose();
  return Y;
}

}  // namespace wbc
