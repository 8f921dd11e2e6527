#include "wbc/robots.hpp"

#include "wbc/dynamics.hpp"

namespace wbc {

namespace {

Eigen::Matrix3d box_inertia_about_origin(double mass, const Eigen::Vector3d& size,
                                         const Eigen::Vector3d& com)
{
  const double x2 = size.x() * size.x(), y2 = size.y() * size.y(), z2 = size.z() * size.z();
  Eigen::Matrix3d Ic = Eigen::Vector3d(y2 + z2, x2 + z2, x2 + y2).asDiagonal();
  Ic *= mass / 12.0;
  return Ic + mass * (com.squaredNorm() * Eigen::Matrix3d::Identity() - com * com.transpose());
}

LinkParams box_link(const std::string& name, double mass, const Eigen::Vector3d& com,
                    const Eigen::Vector3d& size)
{
  return {name, mass, com, box_inertia_about_origin(mass, size, com)};
}

struct LegJointSpec
{
  const char* name;
  Eigen::Vector3d axis;
  double z_offset;
  double q_min, q_max, tau_max, gear, coulomb, viscous;
};

void add_leg(ModelDescription& d, const std::string& side, double y_sign,
             const std::string& parent, const Eigen::Vector3d& hip_origin)
{
  using namespace walker3;
  const double leg_mass = kTotalMass * kLegMassFraction;
  const LegJointSpec joints[6] = {
      {"hip_yaw", Eigen::Vector3d::UnitZ(), 0.0, -0.8, 0.8, 80.0, 100.0, 3.0, 0.20},
      {"hip_roll", Eigen::Vector3d::UnitX(), -kHipStack / 2, -0.5, 0.5, 150.0, 100.0, 4.0, 0.25},
      {"hip_pitch", Eigen::Vector3d::UnitY(), -kHipStack / 2, -2.0, 1.0, 150.0, 100.0, 5.0, 0.30},
      {"knee", Eigen::Vector3d::UnitY(), -kThighLength, -0.05, 2.5, 200.0, 100.0, 5.0, 0.30},
      {"ankle_pitch", Eigen::Vector3d::UnitY(), -kShankLength, -1.0, 1.0, 100.0, 80.0, 3.0, 0.20},
      {"ankle_roll", Eigen::Vector3d::UnitX(), 0.0, -0.5, 0.5, 60.0, 80.0, 2.0, 0.15},
  };
  const std::string link_names[6] = {"hip_yaw_link", "hip_roll_link", "thigh",
                                     "shank", "ankle_link", "foot"};
  const Eigen::Vector3d coms[6] = {{0, 0, -0.03}, {0, 0, -0.02}, {0, 0, -kThighLength / 2},
                                   {0, 0, -kShankLength / 2}, {0, 0, 0}, {0, 0, -0.05}};
  const Eigen::Vector3d sizes[6] = {{0.10, 0.08, 0.06}, {0.08, 0.10, 0.06}, {0.09, 0.09, 0.38},
                                    {0.08, 0.08, 0.38}, {0.07, 0.07, 0.05}, {0.24, 0.12, 0.05}};

  std::string prev = parent;
  for (int i = 0; i < 6; ++i) {
    const std::string link = side + "_" + link_names[i];
    d.links.push_back(box_link(link, leg_mass * kLegLinkFractions[i], coms[i], sizes[i]));

    JointParams j;
    j.name = side + "_" + joints[i].name;
    j.parent = prev;
    j.child = link;
    j.axis = joints[i].axis;
    j.origin_xyz = i == 0 ? hip_origin : Eigen::Vector3d(0, 0, joints[i].z_offset);
    j.position_min = joints[i].q_min;
    j.position_max = joints[i].q_max;
    j.velocity_limit = 8.0;
    j.torque_min = -joints[i].tau_max;
    j.torque_max = joints[i].tau_max;
    j.gear_ratio = joints[i].gear;
    j.current_torque_coeff = 0.1;
    j.friction = {joints[i].coulomb, joints[i].viscous};
    // Mirror the roll/yaw joint ranges on the right leg.
    if (y_sign < 0 && (i == 0 || i == 1 || i == 5)) {
      const double lo = j.position_min;
      j.position_min = -j.position_max;
      j.position_max = -lo;
    }
    d.joints.push_back(j);
    prev = link;
  }

  ContactParams sole;
  sole.name = side + "_sole";
  sole.link = side + "_foot";
  sole.offset_xyz = {0, 0, -kAnkleToSole};
  sole.lx_minus = sole.lx_plus = 0.12;
  sole.ly_minus = sole.ly_plus = 0.06;
  sole.mu = 0.6;
  d.contacts.push_back(sole);
}

ModelDescription walker3_description(double torso_com_x)
{
  using namespace walker3;
  ModelDescription d;
  d.name = "walker3_like";
  d.floating_base = true;
  d.links.push_back(box_link("torso", kTotalMass * kTorsoMassFraction,
                             {torso_com_x, 0.0, 0.22}, {0.30, 0.35, 0.60}));
  add_leg(d, "l", 1.0, "torso", {0.0, kHipWidth, 0.0});
  add_leg(d, "r", -1.0, "torso", {0.0, -kHipWidth, 0.0});
  return d;
}

RobotState nominal_state_for(const RobotModel& model)
{
  RobotState s = RobotState::zero(model);
  for (const char* side : {"l", "r"}) {
    const std::string p(side);
    s.q(model.joint_index(p + "_hip_pitch")) = -walker3::kNominalKneeBend / 2;
    s.q(model.joint_index(p + "_knee")) = walker3::kNominalKneeBend;
    s.q(model.joint_index(p + "_ankle_pitch")) = -walker3::kNominalKneeBend / 2;
  }
  const FrameRef sole = model.contact_frame(0);
  const Transform pose = frame_pose(model, forward_kinematics(model, s), sole);
  s.base_position.z() = -pose.p.z();
  return s;
}

}  // namespace

RobotModel build_walker3_like()
{
  const RobotModel draft(walker3_description(0.0));
  const RobotState nominal = nominal_state_for(draft);
  const ComState c = center_of_mass(draft, nominal);
  const double torso_mass = walker3::kTotalMass * walker3::kTorsoMassFraction;
  // CoM x of the soles is zero in the nominal stance.
  const double torso_com_x = -(c.position.x() - nominal.base_position.x()) * c.mass / torso_mass;
  return RobotModel(walker3_description(torso_com_x));
}

RobotState walker3_nominal_state(const RobotModel& model)
{
  return nominal_state_for(model);
}

RobotModel build_walker3_leg()
{
  ModelDescription d;
  d.name = "walker3_leg";
  d.floating_base = false;
  add_leg(d, "l", 1.0, "world", Eigen::Vector3d::Zero());
  return RobotModel(std::move(d));
}

RobotModel build_planar_chain(int links, double length, double mass)
{
  ModelDescription d;
  d.name = "planar_chain_" + std::to_string(links);
  d.floating_base = false;
  std::string prev = "world";
  for (int i = 0; i < links; ++i) {
    const std::string name = "link" + std::to_string(i + 1);
    d.links.push_back(box_link(name, mass, {0, 0, -length / 2}, {0.02, 0.02, length}));
    JointParams j;
    j.name = "joint" + std::to_string(i + 1);
    j.parent = prev;
    j.child = name;
    j.axis = -Eigen::Vector3d::UnitY();
    j.origin_xyz = i == 0 ? Eigen::Vector3d::Zero() : Eigen::Vector3d(0, 0, -length);
    j.position_min = -2 * M_PI;
    j.position_max = 2 * M_PI;
    j.velocity_limit = 20.0;
    j.torque_min = -100.0;
    j.torque_max = 100.0;
    d.joints.push_back(j);
    prev = name;
  }
  ContactParams tip;
  tip.name = "tip";
  tip.link = prev;
  tip.offset_xyz = {0, 0, -length};
  d.contacts.push_back(tip);
  return RobotModel(std::move(d));
}

RobotModel build_pendulum() { return build_planar_chain(1); }
RobotModel build_planar_double() { return build_planar_chain(2); }
RobotModel build_planar_triple() { return build_planar_chain(3); }

}  // namespace wbc
