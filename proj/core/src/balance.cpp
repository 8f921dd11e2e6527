#include "wbc/balance.hpp"

#include <cmath>
#include <stdexcept>

namespace wbc {

namespace {

// Rotation-log pose error [angular; linear] of `ref` relative to `current`.
Vector6d pose_error(const Transform& ref, const Transform& current)
{
  Vector6d e;
  e.head<3>() = log_so3(ref.R * current.R.transpose());
  e.tail<3>() = ref.p - current.p;
  return e;
}

Eigen::Matrix<double, 6, 6> block_rotation(const Eigen::Matrix3d& R)
{
  Eigen::Matrix<double, 6, 6> X = Eigen::Matrix<double, 6, 6>::Zero();
  X.topLeftCorner<3, 3>() = R;
  X.bottomRightCorner<3, 3>() = R;
  return X;
}

void check_contact_vectors(const RobotModel& model, std::size_t zmp, std::size_t contact)
{
  const std::size_t nc = model.contacts().size();
  if (zmp != nc || contact != nc)
    throw std::invalid_argument("expected one ZMP and one contact flag per contact frame (" +
                                std::to_string(nc) + ")");
}

}  // namespace

void HierarchyConfig::validate() const
{
  for (const TaskGains* g : {&foot, &com, &torso})
    if (g->kp < 0.0 || g->kd < 0.0)
      throw std::invalid_argument("task gains must be non-negative");
  if (!(safe_region_scale > 0.0 && safe_region_scale <= 1.0))
    throw std::invalid_argument("safe_region_scale must lie in (0, 1]");
  if (!(mu > 0.0))
    throw std::invalid_argument("mu must be positive");
  if (cop_margin < 0.0)
    throw std::invalid_argument("cop_margin must be non-negative");
  if (zmp_min_force < 0.0)
    throw std::invalid_argument("zmp_min_force must be non-negative");
  if (!(force_weight > 0.0))
    throw std::invalid_argument("force_weight must be positive");
}

Zmp measured_zmp(const Vector6d& wrench, double min_force)
{
  Zmp z;
  const double fz = wrench(5);
  if (!(fz > min_force))
    return z;
  z.position << -wrench(1) / fz, wrench(0) / fz;
  z.valid = true;
  return z;
}

Vector6d to_sole_frame(const Transform& sole, const Vector6d& world_wrench)
{
  Vector6d w;
  w.head<3>() = sole.R.transpose() * world_wrench.head<3>();
  w.tail<3>() = sole.R.transpose() * world_wrench.tail<3>();
  return w;
}

bool inside_sole(const ContactParams& c, const Eigen::Vector2d& p, double scale, double tol)
{
  return p.x() >= -scale * c.lx_minus - tol && p.x() <= scale * c.lx_plus + tol &&
         p.y() >= -scale * c.ly_minus - tol && p.y() <= scale * c.ly_plus + tol;
}

References plan_references(const RobotModel& model, const RobotState& state,
                           const std::vector<Zmp>& zmp, const std::vector<bool>& contact,
                           const HierarchyConfig& config, const References* previous)
{
  check_contact_vectors(model, zmp.size(), contact.size());
  const std::size_t nc = model.contacts().size();
  if (nc == 0)
    throw std::invalid_argument("plan_references: model has no contact frames");
  const bool have_previous = previous && previous->foot.size() == nc;
  const Kinematics kin = forward_kinematics(model, state);

  References refs;
  refs.foot.resize(nc);
  bool any_contact = false;
  for (std::size_t i = 0; i < nc; ++i) {
    const FrameRef frame = model.contact_frame(static_cast<int>(i));
    FootReference current{frame_pose(model, kin, frame), frame_velocity(model, kin, frame)};
    const bool in_safe_region =
        contact[i] && zmp[i].valid &&
        inside_sole(model.contacts()[i], zmp[i].position, config.safe_region_scale);
    any_contact = any_contact || contact[i];
    refs.foot[i] = (in_safe_region || !have_previous) ? current : previous->foot[i];
  }

  if (!any_contact && have_previous) {
    References held = *previous;
    held.contact_lost = true;
    return held;
  }
  refs.contact_lost = !any_contact;

  if (config.standing_height_offset)
    refs.standing_height_offset = *config.standing_height_offset;
  else if (have_previous)
    refs.standing_height_offset = previous->standing_height_offset;
  else {
    double foot_z = 0.0;
    for (const auto& f : refs.foot)
      foot_z += f.pose.p.z();
    refs.standing_height_offset = center_of_mass(model, state).position.z() - foot_z / nc;
  }

  Eigen::Vector3d mean_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_velocity = Eigen::Vector3d::Zero();
  for (const auto& f : refs.foot) {
    mean_position += f.pose.p;
    mean_velocity += f.velocity.tail<3>();
  }
  mean_position /= static_cast<double>(nc);
  mean_velocity /= static_cast<double>(nc);
  refs.com_position = mean_position;
  refs.com_position.z() += refs.standing_height_offset;
  refs.com_velocity = mean_velocity;

  refs.torso_orientation.setIdentity();
  refs.torso_angular_velocity.setZero();

  // Weight split evenly over the feet in contact.
  int in_contact = 0;
  for (std::size_t i = 0; i < nc; ++i)
    in_contact += contact[i] ? 1 : 0;
  const double weight = model.total_mass() * model.gravity().norm();
  refs.force.assign(nc, Vector6d::Zero());
  for (std::size_t i = 0; i < nc; ++i)
    if (contact[i] || in_contact == 0)
      refs.force[i](5) = weight / (in_contact == 0 ? nc : in_contact);
  return refs;
}

int hierarchy_variables(const RobotModel& model)
{
  return model.nv() + 6 * static_cast<int>(model.contacts().size());
}

std::vector<Level> build_hierarchy(const RobotModel& model, const RobotState& state,
                                   const References& refs, const HierarchyConfig& config,
                                   const std::vector<bool>& contact)
{
  const int nv = model.nv();
  const int nc = static_cast<int>(model.contacts().size());
  const int nb = model.base_dofs();
  const int n = model.num_joints();
  const int nx = hierarchy_variables(model);
  if (static_cast<int>(contact.size()) != nc || static_cast<int>(refs.foot.size()) != nc ||
      static_cast<int>(refs.force.size()) != nc)
    throw std::invalid_argument("build_hierarchy: references do not match the contact frames");
  if (nb != 6)
    throw std::invalid_argument("build_hierarchy requires a floating-base model");

  const Kinematics kin = forward_kinematics(model, state);
  const Eigen::MatrixXd M = mass_matrix(model, state);
  const Eigen::VectorXd h = nonlinear_effects(model, state);
  Eigen::MatrixXd Jc(6 * nc, nv);
  std::vector<Transform> sole(nc);
  for (int i = 0; i < nc; ++i) {
    const FrameRef frame = model.contact_frame(i);
    Jc.middleRows<6>(6 * i) = frame_jacobian(model, kin, frame);
    sole[i] = frame_pose(model, kin, frame);
  }

  // Generalized force rows: [M, -Jc'] x + h.
  Eigen::MatrixXd dyn(nv, nx);
  dyn.leftCols(nv) = M;
  dyn.rightCols(6 * nc) = -Jc.transpose();

  std::vector<Level> levels(4, Level::empty(nx));
  levels[0].name = "dynamics";
  levels[1].name = "feet";
  levels[2].name = "com";
  levels[3].name = "torso+forces";

  // Level 1: floating-base dynamics, torque limits, zero wrench on lifted feet.
  {
    int lifted = 0;
    for (int i = 0; i < nc; ++i)
      lifted += contact[i] ? 0 : 1;
    Level& l = levels[0];
    l.A.setZero(nb + 6 * lifted, nx);
    l.b.setZero(nb + 6 * lifted);
    l.A.topRows(nb) = dyn.topRows(nb);
    l.b.head(nb) = -h.head(nb);
    for (int i = 0, row = nb; i < nc; ++i) {
      if (contact[i])
        continue;
      l.A.block(row, nv + 6 * i, 6, 6).setIdentity();
      row += 6;
    }
    l.D.resize(2 * n, nx);
    l.f.resize(2 * n);
    l.D.topRows(n) = dyn.bottomRows(n);
    l.D.bottomRows(n) = -dyn.bottomRows(n);
    l.f.head(n) = model.torque_max() - h.tail(n);
    l.f.tail(n) = -model.torque_min() + h.tail(n);
  }

  // Level 2: foot accelerations and contact wrench constraints.
  {
    Level& l = levels[1];
    l.A.setZero(6 * nc, nx);
    l.b.resize(6 * nc);
    for (int i = 0; i < nc; ++i) {
      const FrameRef frame = model.contact_frame(i);
      const Vector6d v = frame_velocity(model, kin, frame);
      const Vector6d a_des = config.foot.kp * pose_error(refs.foot[i].pose, sole[i]) +
                             config.foot.kd * (refs.foot[i].velocity - v);
      l.A.block(6 * i, 0, 6, nv) = Jc.middleRows<6>(6 * i);
      l.b.segment<6>(6 * i) = a_des - jdot_qdot(model, kin, frame);
    }

    int rows = 0;
    for (int i = 0; i < nc; ++i)
      rows += contact[i] ? 9 : 0;
    l.D.setZero(rows, nx);
    l.f.setZero(rows);
    const double pyramid = config.mu / std::sqrt(2.0);
    int r = 0;
    for (int i = 0; i < nc; ++i) {
      if (!contact[i])
        continue;
      const ContactParams& c = model.contacts()[i];
      const double m = config.cop_margin;
      // Rows act on the sole-frame wrench [nx ny nz fx fy fz].
      Eigen::Matrix<double, 9, 6> local = Eigen::Matrix<double, 9, 6>::Zero();
      local.row(0) << 0, -1, 0, 0, 0, -(c.lx_plus - m);   // p_x <= lx+
      local.row(1) << 0, 1, 0, 0, 0, -(c.lx_minus - m);   // p_x >= -lx-
      local.row(2) << 1, 0, 0, 0, 0, -(c.ly_plus - m);    // p_y <= ly+
      local.row(3) << -1, 0, 0, 0, 0, -(c.ly_minus - m);  // p_y >= -ly-
      local.row(4) << 0, 0, 0, 1, 0, -pyramid;
      local.row(5) << 0, 0, 0, -1, 0, -pyramid;
      local.row(6) << 0, 0, 0, 0, 1, -pyramid;
      local.row(7) << 0, 0, 0, 0, -1, -pyramid;
      local.row(8) << 0, 0, 0, 0, 0, -1;                   // f_z >= 0
      l.D.block(r, nv + 6 * i, 9, 6) = local * block_rotation(sole[i].R.transpose());
      r += 9;
    }
  }

  // Level 3: CoM acceleration via the linear centroidal momentum rows.
  {
    const CentroidalMatrix cmm = centroidal_momentum(model, state);
    const ComState com = center_of_mass(model, state);
    const Eigen::Vector3d a_des = config.com.kp * (refs.com_position - com.position) +
                                  config.com.kd * (refs.com_velocity - com.velocity);
    Level& l = levels[2];
    l.A.setZero(3, nx);
    l.A.leftCols(nv) = cmm.A.bottomRows<3>();
    l.b = com.mass * a_des - cmm.adot_qdot.tail<3>();
  }

  // Level 4: torso orientation and contact force references.
  {
    const FrameRef torso{model.root_link(), Transform{}};
    const Transform pose = frame_pose(model, kin, torso);
    const Vector6d v = frame_velocity(model, kin, torso);
    const Matrix6Xd J = frame_jacobian(model, kin, torso);
    const Eigen::Vector3d alpha_des =
        config.torso.kp * log_so3(refs.torso_orientation * pose.R.transpose()) +
        config.torso.kd * (refs.torso_angular_velocity - v.head<3>());
    Level& l = levels[3];
    l.A.setZero(3 + 6 * nc, nx);
    l.b.resize(3 + 6 * nc);
    l.A.topLeftCorner(3, nv) = J.topRows<3>();
    l.b.head<3>() = alpha_des - jdot_qdot(model, kin, torso).head<3>();
    l.A.bottomRightCorner(6 * nc, 6 * nc).setIdentity();
    l.A.bottomRightCorner(6 * nc, 6 * nc) *= config.force_weight;
    for (int i = 0; i < nc; ++i)
      l.b.segment<6>(3 + 6 * i) = config.force_weight * refs.force[i];
  }
  return levels;
}

Eigen::VectorXd extract_torque(const RobotModel& model, const RobotState& state,
                               const Eigen::VectorXd& qdd_opt, const Eigen::VectorXd& F_opt)
{
  const int nc = static_cast<int>(model.contacts().size());
  if (F_opt.size() != 6 * nc)
    throw std::invalid_argument("extract_torque: expected " + std::to_string(6 * nc) + " wrench entries");
  std::vector<ExternalWrench> wrenches(nc);
  for (int i = 0; i < nc; ++i)
    wrenches[i] = {model.contact_frame(i), F_opt.segment<6>(6 * i)};
  return rnea(model, state, qdd_opt, wrenches).tail(model.num_joints());
}

WbcSolution make_solution(const RobotModel& model, const RobotState& state, HqpSolution hqp)
{
  WbcSolution s;
  s.qdd_opt = hqp.x.head(model.nv());
  s.F_opt = hqp.x.tail(6 * model.contacts().size());
  s.tau_opt = extract_torque(model, state, s.qdd_opt, s.F_opt);
  s.diagnostics = std::move(hqp);
  return s;
}

JointControlParams JointControlParams::from_model(const RobotModel& model)
{
  const int n = model.num_joints();
  JointControlParams p;
  p.k_i.resize(n);
  p.coulomb.resize(n);
  p.viscous.resize(n);
  p.velocity_limit.resize(n);
  for (int j = 0; j < n; ++j) {
    const JointParams& jp = model.joint(j);
    p.k_i(j) = jp.current_torque_coeff;
    p.coulomb(j) = jp.friction.coulomb;
    p.viscous(j) = jp.friction.viscous;
    p.velocity_limit(j) = jp.velocity_limit;
  }
  p.qdot_des = Eigen::VectorXd::Zero(n);
  return p;
}

void JointControlParams::reset(const Eigen::VectorXd& qdot)
{
  qdot_des = qdot.cwiseMax(-velocity_limit).cwiseMin(velocity_limit);
}

void JointControlParams::validate() const
{
  const auto n = k_i.size();
  if (coulomb.size() != n || viscous.size() != n || velocity_limit.size() != n || qdot_des.size() != n)
    throw std::invalid_argument("joint control parameters have inconsistent sizes");
  if ((coulomb.array() < 0.0).any() || (viscous.array() < 0.0).any())
    throw std::invalid_argument("friction parameters must be non-negative");
  if (!(qdot_star > 0.0))
    throw std::invalid_argument("qdot_star must be positive");
  if (k_f < 0.0 || k_f > 1.0)
    throw std::invalid_argument("k_f must lie in [0, 1]");
  if (k_qdot < 0.0)
    throw std::invalid_argument("k_qdot must be non-negative");
  if (leak <= 0.0 || leak > 1.0)
    throw std::invalid_argument("leak must lie in (0, 1]");
}

Eigen::VectorXd friction_compensation(const Eigen::VectorXd& qdot_des, const JointControlParams& params)
{
  Eigen::VectorXd tau(qdot_des.size());
  for (Eigen::Index j = 0; j < qdot_des.size(); ++j)
    tau(j) = friction_torque(qdot_des(j), params.coulomb(j), params.viscous(j), params.qdot_star);
  return tau;
}

JointCommand joint_command(const Eigen::VectorXd& tau_opt, const Eigen::VectorXd& qdd_opt,
                           const RobotState& state, JointControlParams& params, double dt)
{
  const auto n = params.k_i.size();
  if (tau_opt.size() != n || qdd_opt.size() != n || state.dq.size() != n)
    throw std::invalid_argument("joint_command: expected " + std::to_string(n) + " joints");
  params.qdot_des = (params.leak * params.qdot_des + qdd_opt * dt)
                        .cwiseMax(-params.velocity_limit)
                        .cwiseMin(params.velocity_limit);
  JointCommand cmd;
  cmd.qdot_des = params.qdot_des;
  cmd.tau_friction = friction_compensation(params.qdot_des, params);
  cmd.tau_velocity = params.k_qdot * (params.qdot_des - state.dq);
  cmd.current = params.k_i.cwiseProduct(tau_opt + params.k_f * cmd.tau_friction + cmd.tau_velocity);
  return cmd;
}

}  // namespace wbc
