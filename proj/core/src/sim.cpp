#include "wbc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

namespace wbc {

namespace {

// Cosine blend on [0, 1] and its derivative.
std::pair<double, double> blend(double s)
{
  if (s <= 0.0)
    return {0.0, 0.0};
  if (s >= 1.0)
    return {1.0, 0.0};
  return {0.5 - 0.5 * std::cos(M_PI * s), 0.5 * M_PI * std::sin(M_PI * s)};
}

Transform sole_corner(const ContactParams& c, int k)
{
  Transform t;
  t.p.x() = (k == 0 || k == 3) ? c.lx_plus : -c.lx_minus;
  t.p.y() = (k == 0 || k == 1) ? c.ly_plus : -c.ly_minus;
  return t;
}

std::string state_dump(const RobotState& s, double time)
{
  std::ostringstream out;
  out << "t=" << time << " base_position=[" << s.base_position.transpose() << "] quaternion=["
      << s.base_orientation.coeffs().transpose() << "] base_twist=[" << s.base_twist.transpose()
      << "] q=[" << s.q.transpose() << "] dq=[" << s.dq.transpose() << "]";
  return out.str();
}

}  // namespace

Eigen::Vector3d SupportPose::point_velocity(const Eigen::Vector3d& x) const
{
  return velocity.tail<3>() + velocity.head<3>().cross(x - pose.p);
}

SupportPose SupportProfile::evaluate(double t) const
{
  SupportPose s;
  s.pose.p = origin;
  switch (kind) {
    case Kind::kFlat:
    case Kind::kNone:
      break;
    case Kind::kTilt: {
      if (keyframes.empty())
        break;
      double roll = keyframes.front().roll, pitch = keyframes.front().pitch;
      double roll_rate = 0.0, pitch_rate = 0.0;
      if (t >= keyframes.back().time) {
        roll = keyframes.back().roll;
        pitch = keyframes.back().pitch;
      } else {
        for (std::size_t k = 0; k + 1 < keyframes.size(); ++k) {
          const TiltKeyframe& a = keyframes[k];
          const TiltKeyframe& b = keyframes[k + 1];
          if (t < a.time || t >= b.time)
            continue;
          const double span = b.time - a.time;
          const auto [w, dw] = blend((t - a.time) / span);
          roll = a.roll + (b.roll - a.roll) * w;
          pitch = a.pitch + (b.pitch - a.pitch) * w;
          roll_rate = (b.roll - a.roll) * dw / span;
          pitch_rate = (b.pitch - a.pitch) * dw / span;
          break;
        }
      }
      const Eigen::Matrix3d Rx = Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()).toRotationMatrix();
      s.pose.R = Rx * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()).toRotationMatrix();
      s.velocity.head<3>() = roll_rate * Eigen::Vector3d::UnitX() + Rx * (pitch_rate * Eigen::Vector3d::UnitY());
      break;
    }
    case Kind::kTranslate: {
      const double tau = t - start;
      if (tau <= 0.0)
        break;
      double e = 1.0, de = 0.0;
      if (ramp > 0.0) {
        const auto [w, dw] = blend(tau / ramp);
        e = w;
        de = dw / ramp;
      }
      const double arg = omega * tau + phase;
      const double offset = amplitude * e * (std::sin(arg) - std::sin(phase));
      const double rate = amplitude * (de * (std::sin(arg) - std::sin(phase)) + e * omega * std::cos(arg));
      s.pose.p += offset * axis;
      s.velocity.tail<3>() = rate * axis;
      break;
    }
  }
  return s;
}

double mechanical_energy(const RobotModel& model, const RobotState& state)
{
  const Eigen::VectorXd v = state.velocity(model);
  const ComState com = center_of_mass(model, state);
  return 0.5 * v.dot(mass_matrix(model, state) * v) - com.mass * model.gravity().dot(com.position);
}

World::World(const RobotModel& model, const RobotState& initial, SimParams params,
             std::vector<SupportProfile> supports)
  : model_(model), state_(initial), params_(params), supports_(std::move(supports)), rng_(params.seed)
{
  state_.check(model_);
  const std::size_t nc = model_.contacts().size();
  if (supports_.empty()) {
    supports_.resize(nc);
    if (!model_.floating_base())
      for (auto& sp : supports_)
        sp.kind = SupportProfile::Kind::kNone;
  }
  if (supports_.size() != nc)
    throw std::invalid_argument("World: expected one support profile per contact frame");
  points_.resize(nc);
  for (std::size_t i = 0; i < nc; ++i)
    for (int k = 0; k < 4; ++k)
      points_[i][k].local = sole_corner(model_.contacts()[i], k).p;
  motor_torque_ = Eigen::VectorXd::Zero(model_.num_joints());
  update_contact_geometry(forward_kinematics(model_, state_));
  // Corners starting below a surface carry their spring force from t = 0.
  for (std::size_t i = 0; i < nc; ++i) {
    const SupportPose support = support_pose(static_cast<int>(i));
    for (auto& pt : points_[i]) {
      if (pt.penetration <= 0.0)
        continue;
      pt.in_contact = true;
      pt.anchor = support.pose.R.transpose() * (pt.position - support.pose.p);
      pt.anchor.z() = 0.0;
      pt.force = params_.normal_stiffness * pt.penetration * support.pose.R.col(2);
    }
  }
}

SupportPose World::support_pose(int foot) const
{
  return support_pose(foot, time_);
}

SupportPose World::support_pose(int foot, double t) const
{
  return supports_.at(foot).evaluate(t);
}

double World::energy() const
{
  return mechanical_energy(model_, state_);
}

RobotState World::measured_state()
{
  RobotState s = state_;
  if (params_.velocity_noise > 0.0) {
    std::normal_distribution<double> noise(0.0, params_.velocity_noise);
    for (Eigen::Index j = 0; j < s.dq.size(); ++j)
      s.dq(j) += noise(rng_);
  }
  return s;
}

void World::update_contact_geometry(const Kinematics& kin)
{
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Transform sole = frame_pose(model_, kin, model_.contact_frame(static_cast<int>(i)));
    const SupportPose support = support_pose(static_cast<int>(i));
    const Eigen::Vector3d n = support.pose.R.col(2);
    const bool none = supports_[i].kind == SupportProfile::Kind::kNone;
    for (auto& pt : points_[i]) {
      pt.position = sole.act(pt.local);
      pt.penetration = none ? 0.0 : -n.dot(pt.position - support.pose.p);
    }
  }
}

void World::step(const Eigen::VectorXd& currents, double dt)
{
  const int n = model_.num_joints();
  const int nv = model_.nv();
  if (currents.size() != n)
    throw std::invalid_argument("World::step: expected " + std::to_string(n) + " currents");
  if (!(dt > 0.0) || dt > 1e-3 + 1e-12)
    throw std::invalid_argument("World::step: dt must lie in (0, 1 ms]");

  // Drift half a step, kick with velocity-implicit forces evaluated at the
  // midpoint, drift again. Velocity-product terms use the bilinear form
  // B(v, v+) of the bias force, which keeps energy drift second order.
  const Eigen::VectorXd v = state_.velocity(model_);
  const RobotState mid = state_.integrated(model_, v, 0.5 * dt);
  const double t_mid = time_ + 0.5 * dt;
  const Kinematics kin = forward_kinematics(model_, mid);
  const Eigen::MatrixXd M = mass_matrix(model_, mid);
  const Eigen::VectorXd g = gravity_vector(model_, mid);
  Eigen::MatrixXd B(nv, nv);
  {
    const Eigen::VectorXd h = nonlinear_effects(model_, mid);
    RobotState probe = mid;
    for (int i = 0; i < nv; ++i) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(nv, i);
      probe.set_velocity(model_, v + e);
      B.col(i) = nonlinear_effects(model_, probe) - h;
      probe.set_velocity(model_, e);
      B.col(i) -= nonlinear_effects(model_, probe) - g;
    }
    B *= 0.5;
  }

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(nv);
  for (int j = 0; j < n; ++j) {
    const JointParams& jp = model_.joint(j);
    motor_torque_(j) = std::clamp(currents(j) / jp.current_torque_coeff, jp.torque_min, jp.torque_max);
    tau(model_.joint_dof(j)) = motor_torque_(j);
  }

  for (const Impulse& imp : impulses_) {
    if (t_mid < imp.start || t_mid >= imp.start + imp.duration)
      continue;
    const int link = imp.link.empty() ? model_.root_link() : model_.link_index(imp.link);
    FrameRef frame{link, Transform{}};
    frame.offset.p = imp.point;
    tau += frame_jacobian(model_, kin, frame).bottomRows<3>().transpose() * imp.force;
  }

  // Joint friction, linearized around the current velocity.
  Eigen::MatrixXd A = M + dt * B;
  Eigen::VectorXd rhs = M * v + dt * (tau - g);
  if (params_.joint_friction) {
    const double scale = 1.0 + params_.friction_mismatch;
    const double band = params_.friction_band;
    for (int j = 0; j < n; ++j) {
      const JointParams& jp = model_.joint(j);
      const double fc = scale * jp.friction.coulomb, fv = scale * jp.friction.viscous;
      const double qd = state_.dq(j);
      const double slope = std::abs(qd) < band ? fc / band : fv;
      const int dof = model_.joint_dof(j);
      A(dof, dof) += dt * slope;
      rhs(dof) += dt * (-friction_torque(qd, fc, fv, band) + slope * qd);
    }
  }

  // Penalty contacts, implicit in the spring and damper terms.
  struct Candidate
  {
    int foot, corner;
    Eigen::Matrix<double, 3, Eigen::Dynamic> J;
    Eigen::Vector3d n, e, v_surface;
    double mu;
    bool active = true;
    bool slipping = false;
    Eigen::Vector3d slip_force = Eigen::Vector3d::Zero();
    Eigen::Vector3d force = Eigen::Vector3d::Zero();
  };
  std::vector<Candidate> cand;
  const double kn = params_.normal_stiffness, cn = params_.normal_damping;
  const double kt = params_.tangential_stiffness, ct = params_.tangential_damping;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (supports_[i].kind == SupportProfile::Kind::kNone)
      continue;
    const SupportPose support = support_pose(static_cast<int>(i), t_mid);
    const Eigen::Vector3d normal = support.pose.R.col(2);
    const FrameRef sole = model_.contact_frame(static_cast<int>(i));
    const Transform sole_pose = frame_pose(model_, kin, sole);
    for (int k = 0; k < 4; ++k) {
      ContactPointState& pt = points_[i][k];
      const Eigen::Vector3d x = sole_pose.act(pt.local);
      const double depth = -normal.dot(x - support.pose.p);
      if (depth <= 0.0) {
        pt.in_contact = false;
        continue;
      }
      if (!pt.in_contact) {
        pt.anchor = support.pose.R.transpose() * (x - support.pose.p);
        pt.anchor.z() = 0.0;
      }
      const Eigen::Vector3d anchor = support.pose.act(pt.anchor);
      FrameRef corner = sole;
      corner.offset = sole.offset * sole_corner(model_.contacts()[i], k);
      Candidate c;
      c.foot = static_cast<int>(i);
      c.corner = k;
      c.J = frame_jacobian(model_, kin, corner).bottomRows<3>();
      c.n = normal;
      c.e = x - anchor;
      c.v_surface = support.point_velocity(x);
      c.mu = model_.contacts()[i].mu;
      cand.push_back(std::move(c));
    }
  }

  Eigen::VectorXd v_next;
  for (int pass = 0; pass < 8; ++pass) {
    Eigen::MatrixXd A_c = A;
    Eigen::VectorXd rhs_c = rhs;
    for (const Candidate& c : cand) {
      if (!c.active)
        continue;
      const Eigen::Matrix3d Pn = c.n * c.n.transpose();
      const Eigen::Matrix3d Pt = Eigen::Matrix3d::Identity() - Pn;
      const Eigen::Matrix3d K = c.slipping ? Eigen::Matrix3d(kn * Pn) : Eigen::Matrix3d(kn * Pn + kt * Pt);
      const Eigen::Matrix3d C = c.slipping ? Eigen::Matrix3d(cn * Pn) : Eigen::Matrix3d(cn * Pn + ct * Pt);
      const Eigen::Matrix3d G = 0.5 * dt * K + C;
      A_c.noalias() += dt * c.J.transpose() * G * c.J;
      rhs_c.noalias() += dt * c.J.transpose() * (-K * c.e + G * c.v_surface + c.slip_force);
    }
    v_next = A_c.partialPivLu().solve(rhs_c);

    bool changed = false;
    for (Candidate& c : cand) {
      if (!c.active)
        continue;
      const Eigen::Matrix3d Pn = c.n * c.n.transpose();
      const Eigen::Vector3d w = c.J * v_next - c.v_surface;
      const double fn = -kn * c.n.dot(c.e) - (0.5 * dt * kn + cn) * c.n.dot(w);
      if (fn < 0.0) {
        c.active = false;
        changed = true;
        continue;
      }
      if (c.slipping) {
        c.force = fn * c.n + c.slip_force;
        continue;
      }
      const Eigen::Vector3d ft =
          (Eigen::Matrix3d::Identity() - Pn) * (-kt * c.e - (0.5 * dt * kt + ct) * w);
      if (ft.norm() > c.mu * fn) {
        c.slipping = true;
        c.slip_force = c.mu * fn * ft.normalized();
        changed = true;
        continue;
      }
      c.force = fn * c.n + ft;
    }
    if (!changed)
      break;
  }

  state_ = mid.integrated(model_, v_next, 0.5 * dt);
  state_.set_velocity(model_, v_next);
  time_ += dt;

  if (!state_.base_position.allFinite() || !state_.q.allFinite() || !state_.dq.allFinite() ||
      !state_.base_twist.allFinite() || v_next.cwiseAbs().maxCoeff() > 1e4)
    throw SimulationError("simulation diverged: " + state_dump(state_, time_));

  for (auto& foot : points_)
    for (auto& pt : foot) {
      pt.force.setZero();
      pt.slipping = false;
    }
  const Kinematics kin_next = forward_kinematics(model_, state_);
  update_contact_geometry(kin_next);
  for (const Candidate& c : cand) {
    ContactPointState& pt = points_[c.foot][c.corner];
    if (!c.active) {
      pt.in_contact = false;
      continue;
    }
    pt.in_contact = true;
    pt.force = c.force;
    pt.slipping = c.slipping;
    if (c.slipping) {
      // Re-anchor so the tangential spring carries the sliding force.
      const SupportPose support = support_pose(c.foot);
      const Eigen::Vector3d anchor = pt.position + c.slip_force / kt;
      pt.anchor = support.pose.R.transpose() * (anchor - support.pose.p);
      pt.anchor.z() = 0.0;
    }
  }
}

ContactWrench World::contact_wrench(int foot) const
{
  const Kinematics kin = forward_kinematics(model_, state_);
  const Transform sole = frame_pose(model_, kin, model_.contact_frame(foot));
  ContactWrench out;
  Eigen::Vector3d moment = Eigen::Vector3d::Zero(), force = Eigen::Vector3d::Zero();
  for (int k = 0; k < 4; ++k) {
    const ContactPointState& pt = points_.at(foot)[k];
    out.point_forces[k] = pt.force;
    out.point_positions[k] = pt.position;
    if (pt.in_contact)
      ++out.corners_in_contact;
    moment += (pt.position - sole.p).cross(pt.force);
    force += pt.force;
  }
  out.wrench.head<3>() = sole.R.transpose() * moment;
  out.wrench.tail<3>() = sole.R.transpose() * force;
  return out;
}

}  // namespace wbc
