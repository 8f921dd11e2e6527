#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "random_problems.hpp"
#include "wbc/dynamics.hpp"
#include "wbc/robots.hpp"

using namespace wbc;
using wbc::test::random_state;
using wbc::test::random_vector;

namespace {

std::vector<RobotModel> all_models()
{
  return {build_pendulum(), build_planar_double(), build_planar_triple(), build_walker3_leg(),
          build_walker3_like()};
}

RobotModel zero_gravity(const RobotModel& m)
{
  ModelDescription d = m.description();
  d.gravity.setZero();
  return RobotModel(d);
}

RobotModel without_friction(const RobotModel& m)
{
  ModelDescription d = m.description();
  for (JointParams& j : d.joints)
    j.friction = {};
  return RobotModel(d);
}

Eigen::VectorXd planar_q(const RobotState& s) { return s.q; }

}  // namespace

TEST(Kinematics, PendulumTip)
{
  const RobotModel m = build_pendulum();
  RobotState s = RobotState::zero(m);
  const FrameRef tip = m.frame("tip");
  EXPECT_LT((frame_pose(m, forward_kinematics(m, s), tip).p - Eigen::Vector3d(0, 0, -1)).norm(), 1e-15);
  s.q(0) = M_PI / 2;
  EXPECT_LT((frame_pose(m, forward_kinematics(m, s), tip).p - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
}

TEST(Kinematics, MatchesTransformChainProduct)
{
  std::mt19937 rng(1);
  for (const RobotModel& m : all_models())
    for (int i = 0; i < 50; ++i) {
      const RobotState s = random_state(m, rng);
      const Kinematics kin = forward_kinematics(m, s);
      for (int l = 0; l < m.num_links(); ++l) {
        const Eigen::Isometry3d T = wbc::test::chain_pose(m, s, l);
        EXPECT_LT((kin.pose[l].R - T.rotation()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((kin.pose[l].p - T.translation()).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
}

TEST(Kinematics, UnknownFrame)
{
  const RobotModel m = build_pendulum();
  EXPECT_THROW(m.frame("nope"), ModelError);
}

TEST(Kinematics, DimensionMismatch)
{
  const RobotModel m = build_planar_double();
  RobotState s = RobotState::zero(m);
  s.q.resize(1);
  EXPECT_THROW(forward_kinematics(m, s), ModelError);
}

TEST(Jacobian, FixedBaseRootIsImmobileWorld)
{
  const RobotModel m = build_planar_double();
  std::mt19937 rng(2);
  const RobotState s = random_state(m, rng);
  EXPECT_EQ(frame_jacobian(m, s, m.frame("world")).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Jacobian, FloatingBaseColumnsOnBaseFrame)
{
  // Base twist is in body coordinates; the base frame reports world-axis
  // angular velocity and origin velocity, so the block is diag(R, R).
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(3);
  const RobotState s = random_state(m, rng);
  const Matrix6Xd J = frame_jacobian(m, s, m.frame("torso"));
  const Eigen::Matrix3d R = s.base_orientation.toRotationMatrix();
  EXPECT_LT((J.block(0, 0, 3, 3) - R).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((J.block(3, 3, 3, 3) - R).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(J.block(0, 3, 3, 3).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(J.block(3, 0, 3, 3).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(J.rightCols(12).cwiseAbs().maxCoeff(), 1e-14);
  // In body coordinates the block is the identity.
  Matrix6Xd Jb = J.leftCols(6);
  Jb.topRows(3) = R.transpose() * Jb.topRows(3);
  Jb.bottomRows(3) = R.transpose() * Jb.bottomRows(3);
  EXPECT_LT((Jb - Matrix6d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Jacobian, TimesVelocityEqualsFrameVelocity)
{
  std::mt19937 rng(4);
  for (const RobotModel& m : all_models()) {
    std::vector<FrameRef> frames;
    for (int l = 0; l < m.num_links(); ++l)
      frames.push_back(m.frame(m.link(l).name));
    for (int c = 0; c < static_cast<int>(m.contacts().size()); ++c)
      frames.push_back(m.contact_frame(c));
    for (int i = 0; i < 20; ++i) {
      const RobotState s = random_state(m, rng);
      const Kinematics kin = forward_kinematics(m, s);
      const Eigen::VectorXd v = s.velocity(m);
      for (const FrameRef& f : frames)
        EXPECT_LT((frame_jacobian(m, kin, f) * v - frame_velocity(m, kin, f)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Jacobian, MatchesFiniteDifferenceOfPose)
{
  std::mt19937 rng(5);
  const double h = 1e-7;
  for (const RobotModel& m : all_models())
    for (int i = 0; i < 10; ++i) {
      const RobotState s = random_state(m, rng);
      const Eigen::VectorXd v = s.velocity(m);
      for (int c = 0; c < static_cast<int>(m.contacts().size()); ++c) {
        const FrameRef f = m.contact_frame(c);
        const Transform Tp = frame_pose(m, forward_kinematics(m, s.integrated(m, v, h)), f);
        const Transform Tm = frame_pose(m, forward_kinematics(m, s.integrated(m, v, -h)), f);
        Vector6d fd;
        fd.head<3>() = log_so3(Tp.R * Tm.R.transpose()) / (2 * h);
        fd.tail<3>() = (Tp.p - Tm.p) / (2 * h);
        const Vector6d Jv = frame_jacobian(m, s, f) * v;
        EXPECT_LT((Jv - fd).cwiseAbs().maxCoeff(), 1e-6) << m.name();
      }
    }
}

TEST(JdotQdot, ZeroAtRest)
{
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(6);
  RobotState s = random_state(m, rng);
  s.dq.setZero();
  s.base_twist.setZero();
  EXPECT_EQ(jdot_qdot(m, s, m.contact_frame(0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(JdotQdot, PlanarTwoLinkClosedForm)
{
  const RobotModel m = build_planar_double();
  const wbc::test::PlanarChain oracle{2};
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const RobotState s = random_state(m, rng, 3.0);
    const Vector6d a = jdot_qdot(m, s, m.frame("tip"));
    const Eigen::Vector2d xz = oracle.tip_bias_acceleration(s.q, s.dq);
    EXPECT_NEAR(a(3), xz(0), 1e-9);
    EXPECT_NEAR(a(4), 0.0, 1e-12);
    EXPECT_NEAR(a(5), xz(1), 1e-9);
    EXPECT_LT(a.head<3>().norm(), 1e-12);
  }
}

TEST(JdotQdot, EqualsDerivativeOfFrameVelocityAtZeroAcceleration)
{
  // With ddq = 0 the generalized velocity is constant along s(t), so the
  // frame acceleration is d/dt (J(s(t)) v).
  std::mt19937 rng(8);
  const double h = 1e-6;
  for (const RobotModel& m : all_models())
    for (int i = 0; i < 10; ++i) {
      const RobotState s = random_state(m, rng);
      const Eigen::VectorXd v = s.velocity(m);
      for (int c = 0; c < static_cast<int>(m.contacts().size()); ++c) {
        const FrameRef f = m.contact_frame(c);
        RobotState sp = s.integrated(m, v, h), sm = s.integrated(m, v, -h);
        sp.set_velocity(m, v);
        sm.set_velocity(m, v);
        const Vector6d fd = (frame_jacobian(m, sp, f) * v - frame_jacobian(m, sm, f) * v) / (2 * h);
        EXPECT_LT((jdot_qdot(m, s, f) - fd).cwiseAbs().maxCoeff(), 1e-6) << m.name();
      }
    }
}

TEST(Rnea, PendulumHorizontalGravityTorque)
{
  const RobotModel m = build_pendulum();
  RobotState s = RobotState::zero(m);
  s.q(0) = M_PI / 2;
  EXPECT_NEAR(rnea(m, s, Eigen::VectorXd::Zero(1))(0), 4.905, 1e-12);
}

TEST(Rnea, ZeroGravityZeroMotion)
{
  for (const RobotModel& m0 : all_models()) {
    const RobotModel m = zero_gravity(m0);
    std::mt19937 rng(9);
    RobotState s = random_state(m, rng);
    s.dq.setZero();
    s.base_twist.setZero();
    EXPECT_LT(rnea(m, s, Eigen::VectorXd::Zero(m.nv())).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Rnea, EqualsMassMatrixTimesAccelerationPlusBias)
{
  std::mt19937 rng(10);
  for (const RobotModel& m : all_models())
    for (int i = 0; i < 100; ++i) {
      const RobotState s = random_state(m, rng);
      const Eigen::VectorXd qdd = random_vector(rng, m.nv(), 3.0);
      const Eigen::VectorXd lhs = rnea(m, s, qdd);
      const Eigen::VectorXd rhs = mass_matrix(m, s) * qdd + nonlinear_effects(m, s);
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9) << m.name();
    }
}

TEST(Rnea, ExternalWrenchEntersThroughJacobianTranspose)
{
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(11);
  const RobotState s = random_state(m, rng);
  const Eigen::VectorXd qdd = random_vector(rng, m.nv());
  ExternalWrench w{m.contact_frame(0), random_vector(rng, 6, 20.0)};
  const Eigen::VectorXd with = rnea(m, s, qdd, std::span<const ExternalWrench>(&w, 1));
  const Eigen::VectorXd expected =
      rnea(m, s, qdd) - frame_jacobian(m, s, w.frame).transpose() * w.wrench;
  EXPECT_LT((with - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MassMatrix, PendulumRodAboutPivot)
{
  const RobotModel m = build_pendulum();
  const double I_com = (1.0 + 0.02 * 0.02) / 12.0;
  EXPECT_NEAR(mass_matrix(m, RobotState::zero(m))(0, 0), I_com + 0.25, 1e-14);
}

TEST(MassMatrix, SymmetricPositiveDefinite)
{
  std::mt19937 rng(12);
  for (const RobotModel& m : all_models())
    for (int i = 0; i < 100; ++i) {
      const Eigen::MatrixXd M = mass_matrix(m, random_state(m, rng));
      EXPECT_LT((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(MassMatrix, ColumnsFromUnitAccelerations)
{
  std::mt19937 rng(13);
  for (const RobotModel& m0 : all_models()) {
    const RobotModel m = zero_gravity(m0);
    RobotState s = random_state(m, rng);
    s.dq.setZero();
    s.base_twist.setZero();
    const Eigen::MatrixXd M = mass_matrix(m, s);
    const Eigen::VectorXd bias = rnea(m, s, Eigen::VectorXd::Zero(m.nv()));
    for (int j = 0; j < m.nv(); ++j)
      EXPECT_LT((rnea(m, s, Eigen::VectorXd::Unit(m.nv(), j)) - bias - M.col(j)).cwiseAbs().maxCoeff(),
                1e-10);
  }
}

TEST(MassMatrix, PlanarChainsMatchLagrangian)
{
  std::mt19937 rng(14);
  for (int links : {1, 2, 3}) {
    const RobotModel m = build_planar_chain(links);
    const wbc::test::PlanarChain oracle{links};
    for (int i = 0; i < 50; ++i) {
      const RobotState s = random_state(m, rng);
      EXPECT_LT((mass_matrix(m, s) - oracle.mass_matrix(planar_q(s))).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(NonlinearEffects, GravityAtZeroVelocity)
{
  std::mt19937 rng(15);
  for (const RobotModel& m : all_models()) {
    RobotState s = random_state(m, rng);
    s.dq.setZero();
    s.base_twist.setZero();
    EXPECT_LT((nonlinear_effects(m, s) - gravity_vector(m, s)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(NonlinearEffects, PlanarChainsMatchLagrangian)
{
  std::mt19937 rng(16);
  for (int links : {1, 2, 3}) {
    const RobotModel m = build_planar_chain(links);
    const wbc::test::PlanarChain oracle{links};
    for (int i = 0; i < 50; ++i) {
      const RobotState s = random_state(m, rng);
      EXPECT_LT((gravity_vector(m, s) - oracle.gravity(s.q)).cwiseAbs().maxCoeff(), 1e-12);
      const Eigen::VectorXd h = oracle.coriolis(s.q, s.dq) + oracle.gravity(s.q);
      EXPECT_LT((nonlinear_effects(m, s) - h).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(NonlinearEffects, PendulumEquationOfMotion)
{
  // (I + m l_c^2) qdd + m g l_c sin q = tau.
  const RobotModel m = build_pendulum();
  std::mt19937 rng(17);
  const double J = (1.0 + 0.02 * 0.02) / 12.0 + 0.25;
  for (int i = 0; i < 50; ++i) {
    const RobotState s = random_state(m, rng);
    const double qdd = random_vector(rng, 1)(0);
    const double tau = rnea(m, s, Eigen::VectorXd::Constant(1, qdd))(0);
    EXPECT_NEAR(tau - (J * qdd + 9.81 * 0.5 * std::sin(s.q(0))), 0.0, 1e-9);
  }
}

TEST(NonlinearEffects, CoriolisDoesNoWorkOnTheEnergyBalance)
{
  // Without gravity, d/dt(1/2 v'Mv) = v'(M vdot) + 1/2 v' Mdot v and with
  // M vdot = -C the kinetic energy stays constant: v'C = 1/2 v' Mdot v.
  std::mt19937 rng(18);
  const double h = 1e-6;
  for (const RobotModel& m0 : all_models()) {
    const RobotModel m = zero_gravity(m0);
    for (int i = 0; i < 10; ++i) {
      const RobotState s = random_state(m, rng);
      const Eigen::VectorXd v = s.velocity(m);
      const Eigen::MatrixXd Mdot =
          (mass_matrix(m, s.integrated(m, v, h)) - mass_matrix(m, s.integrated(m, v, -h))) / (2 * h);
      EXPECT_NEAR(v.dot(nonlinear_effects(m, s)), 0.5 * v.dot(Mdot * v), 1e-5) << m.name();
    }
  }
}

TEST(Selection, Matrices)
{
  const RobotModel m = build_walker3_like();
  const SelectionMatrices S = selection_matrices(m);
  EXPECT_EQ(S.floating.rows(), 6);
  EXPECT_EQ(S.actuated.rows(), 12);
  EXPECT_EQ(S.floating.leftCols(6), Eigen::MatrixXd::Identity(6, 6));
  EXPECT_EQ(S.actuated.rightCols(12), Eigen::MatrixXd::Identity(12, 12));
  EXPECT_EQ((S.floating * S.actuated.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Centroidal, ZeroAtRest)
{
  const RobotModel m = build_walker3_like();
  RobotState s = walker3_nominal_state(m);
  EXPECT_EQ((centroidal_momentum(m, s).A * s.velocity(m)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Centroidal, PureTranslation)
{
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(19);
  RobotState s = random_state(m, rng);
  s.dq.setZero();
  const Eigen::Vector3d v_world(0.3, -0.2, 0.5);
  s.base_twist.setZero();
  s.base_twist.tail<3>() = s.base_orientation.inverse() * v_world;
  const Vector6d h = centroidal_momentum(m, s).A * s.velocity(m);
  EXPECT_LT(h.head<3>().norm(), 1e-12);
  EXPECT_LT((h.tail<3>() - 43.0 * v_world).norm(), 1e-12);
}

TEST(Centroidal, MatchesPerLinkMomentumSum)
{
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(20);
  for (int i = 0; i < 100; ++i) {
    const RobotState s = random_state(m, rng);
    const Kinematics kin = forward_kinematics(m, s);
    const ComState com = center_of_mass(m, s);
    Eigen::Vector3d L = Eigen::Vector3d::Zero(), P = Eigen::Vector3d::Zero();
    for (int l = 0; l < m.num_links(); ++l) {
      const LinkParams& lp = m.link(l);
      const Eigen::Matrix3d R = kin.pose[l].R;
      const Eigen::Vector3d w = R * kin.velocity[l].head<3>();
      const Eigen::Vector3d v_origin = R * kin.velocity[l].tail<3>();
      const Eigen::Vector3d c = kin.pose[l].act(lp.com);
      const Eigen::Vector3d v_com = v_origin + w.cross(R * lp.com);
      const Eigen::Matrix3d Ic_body =
          lp.inertia - lp.mass * (lp.com.squaredNorm() * Eigen::Matrix3d::Identity() - lp.com * lp.com.transpose());
      P += lp.mass * v_com;
      L += R * Ic_body * R.transpose() * w + (c - com.position).cross(lp.mass * v_com);
    }
    const Vector6d h = centroidal_momentum(m, s).A * s.velocity(m);
    EXPECT_LT((h.head<3>() - L).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((h.tail<3>() - P).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((h.tail<3>() - com.mass * com.velocity).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Centroidal, BiasIsMomentumRateAtZeroAcceleration)
{
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(21);
  const double h = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const RobotState s = random_state(m, rng);
    const Eigen::VectorXd v = s.velocity(m);
    RobotState sp = s.integrated(m, v, h), sm = s.integrated(m, v, -h);
    const Vector6d fd =
        (centroidal_momentum(m, sp).A * v - centroidal_momentum(m, sm).A * v) / (2 * h);
    EXPECT_LT((centroidal_momentum(m, s).adot_qdot - fd).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Centroidal, RejectsFixedBase)
{
  const RobotModel m = build_planar_double();
  EXPECT_THROW(centroidal_momentum(m, RobotState::zero(m)), std::exception);
}

TEST(Com, SymmetricStanceIsBetweenFeet)
{
  const RobotModel m = build_walker3_like();
  const RobotState s = walker3_nominal_state(m);
  const Kinematics kin = forward_kinematics(m, s);
  const Eigen::Vector3d l = frame_pose(m, kin, m.contact_frame(0)).p;
  const Eigen::Vector3d r = frame_pose(m, kin, m.contact_frame(1)).p;
  const ComState c = center_of_mass(m, s);
  EXPECT_NEAR(c.position.x(), 0.5 * (l.x() + r.x()), 1e-9);
  EXPECT_NEAR(c.position.y(), 0.5 * (l.y() + r.y()), 1e-9);
  EXPECT_NEAR(c.mass, 43.0, 1e-12);
}

TEST(Com, SingleLink)
{
  const RobotModel m = build_pendulum();
  RobotState s = RobotState::zero(m);
  s.q(0) = 0.4;
  const ComState c = center_of_mass(m, s);
  EXPECT_LT((c.position - Eigen::Vector3d(0.5 * std::sin(0.4), 0, -0.5 * std::cos(0.4))).norm(), 1e-15);
}

TEST(Com, VelocityMatchesFiniteDifference)
{
  std::mt19937 rng(22);
  const double h = 1e-7;
  for (const RobotModel& m : all_models())
    for (int i = 0; i < 10; ++i) {
      const RobotState s = random_state(m, rng);
      const Eigen::VectorXd v = s.velocity(m);
      const Eigen::Vector3d fd = (center_of_mass(m, s.integrated(m, v, h)).position -
                                  center_of_mass(m, s.integrated(m, v, -h)).position) / (2 * h);
      EXPECT_LT((center_of_mass(m, s).velocity - fd).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(Regressor, MatchesRneaWithoutFriction)
{
  std::mt19937 rng(23);
  for (const RobotModel& m0 : all_models()) {
    const RobotModel m = without_friction(m0);
    const Eigen::VectorXd pi = parameter_vector(m);
    EXPECT_EQ(pi.size(), parameter_count(m));
    EXPECT_EQ(pi.size(), 10 * m.num_links() + 2 * m.num_joints());
    for (int i = 0; i < 100; ++i) {
      const RobotState s = random_state(m, rng);
      const Eigen::VectorXd qdd = random_vector(rng, m.nv(), 3.0);
      const Eigen::MatrixXd Y = regressor(m, s, qdd);
      EXPECT_EQ(Y.rows(), m.nv());
      EXPECT_LT((Y * pi - rnea(m, s, qdd)).cwiseAbs().maxCoeff(), 1e-9) << m.name();
    }
  }
}

TEST(Regressor, FrictionColumnsAddJointFriction)
{
  const RobotModel m = build_walker3_leg();
  std::mt19937 rng(24);
  const Eigen::VectorXd pi = parameter_vector(m);
  for (int i = 0; i < 50; ++i) {
    RobotState s = random_state(m, rng);
    const Eigen::VectorXd qdd = random_vector(rng, m.nv());
    Eigen::VectorXd friction(m.nv());
    for (int j = 0; j < m.num_joints(); ++j)
      friction(j) = friction_torque(s.dq(j), m.joint(j).friction.coulomb, m.joint(j).friction.viscous,
                                    kDefaultFrictionBand);
    EXPECT_LT((regressor(m, s, qdd) * pi - rnea(m, s, qdd) - friction).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Regressor, LinearInParameters)
{
  const RobotModel m = build_walker3_like();
  std::mt19937 rng(25);
  const RobotState s = random_state(m, rng);
  const Eigen::VectorXd qdd = random_vector(rng, m.nv());
  const Eigen::MatrixXd Y = regressor(m, s, qdd);
  const Eigen::VectorXd p1 = random_vector(rng, Y.cols()), p2 = random_vector(rng, Y.cols());
  const double a = 1.7, b = -0.3;
  EXPECT_LT((Y * (a * p1 + b * p2) - (a * Y * p1 + b * Y * p2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((Y * (2.0 * parameter_vector(m)) - 2.0 * (Y * parameter_vector(m))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Regressor, FrictionColumnsVanishAtRest)
{
  const RobotModel m = build_walker3_leg();
  RobotState s = RobotState::zero(m);
  const Eigen::MatrixXd Y = regressor(m, s, Eigen::VectorXd::Zero(m.nv()));
  EXPECT_EQ(Y.rightCols(2 * m.num_joints()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Friction, BandAndBranches)
{
  EXPECT_EQ(friction_torque(0.0, 5, 0.1, 0.05), 0.0);
  EXPECT_NEAR(friction_torque(0.05, 5, 0.1, 0.05), 5.0, 1e-15);
  EXPECT_NEAR(friction_torque(-0.05, 5, 0.1, 0.05), -5.0, 1e-15);
  EXPECT_NEAR(friction_torque(1.0, 5, 0.1, 0.05), 5.095, 1e-12);
  EXPECT_NEAR(friction_torque(-1.0, 5, 0.1, 0.05), -5.095, 1e-12);
  EXPECT_NEAR(friction_torque(0.025, 5, 0.1, 0.05), 2.5, 1e-12);
  const Eigen::Vector2d basis = friction_basis(1.0, 0.05);
  EXPECT_NEAR(basis.dot(Eigen::Vector2d(5, 0.1)), 5.095, 1e-12);
}
