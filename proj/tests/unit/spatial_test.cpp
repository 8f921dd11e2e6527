#include <random>

#include <gtest/gtest.h>

#include "random_problems.hpp"
#include "wbc/spatial.hpp"

using namespace wbc;
using wbc::test::random_vector;

namespace {

Transform random_transform(std::mt19937& rng)
{
  return {exp_so3(random_vector(rng, 3)), random_vector(rng, 3)};
}

}  // namespace

TEST(Spatial, SkewIsCrossProduct)
{
  const Eigen::Vector3d a(1, -2, 0.5), b(0.3, 0.7, -1.1);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(Spatial, LogExpRoundTrip)
{
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d w = random_vector(rng, 3);
    if (w.norm() > 3.0)
      w *= 3.0 / w.norm();
    EXPECT_LT((log_so3(exp_so3(w)) - w).norm(), 1e-10);
  }
  EXPECT_LT(log_so3(Eigen::Matrix3d::Identity()).norm(), 1e-15);
  const Eigen::Vector3d half_turn(0, M_PI, 0);
  EXPECT_LT((exp_so3(log_so3(exp_so3(half_turn))) - exp_so3(half_turn)).norm(), 1e-10);
}

TEST(Spatial, RpyMatchesAngleAxisProduct)
{
  const Eigen::Vector3d rpy(0.3, -0.2, 1.1);
  const Eigen::Matrix3d R = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  EXPECT_LT((rpy_to_matrix(rpy) - R).norm(), 1e-15);
}

TEST(Spatial, TransformInverseAndComposition)
{
  std::mt19937 rng(5);
  const Transform A = random_transform(rng), B = random_transform(rng);
  const Transform I = A * A.inverse();
  EXPECT_LT((I.R - Eigen::Matrix3d::Identity()).norm(), 1e-14);
  EXPECT_LT(I.p.norm(), 1e-14);
  const Eigen::Vector3d x = random_vector(rng, 3);
  EXPECT_LT(((A * B).act(x) - A.act(B.act(x))).norm(), 1e-14);
}

TEST(Spatial, MotionForceMapsPreservePower)
{
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Transform X = random_transform(rng);
    const Vector6d m = random_vector(rng, 6), f = random_vector(rng, 6);
    EXPECT_NEAR(X.motion_to_child(m).dot(X.force_to_child(f)), m.dot(f), 1e-12);
    EXPECT_LT((X.motion_to_parent(X.motion_to_child(m)) - m).norm(), 1e-13);
    EXPECT_LT((X.force_to_parent(X.force_to_child(f)) - f).norm(), 1e-13);
    EXPECT_LT((X.motion_matrix_to_child() * m - X.motion_to_child(m)).norm(), 1e-13);
  }
}

TEST(Spatial, CrossProductsAreDual)
{
  std::mt19937 rng(9);
  const Vector6d v = random_vector(rng, 6), m = random_vector(rng, 6), f = random_vector(rng, 6);
  // (v x m) . f = -m . (v x* f)
  EXPECT_NEAR(cross_motion(v, m).dot(f), -m.dot(cross_force(v, f)), 1e-12);
  EXPECT_LT(cross_motion(v, v).norm(), 1e-15);
}

TEST(Spatial, InertiaVectorRoundTrip)
{
  Eigen::Matrix3d Ic;
  Ic << 0.3, 0.01, -0.02, 0.01, 0.4, 0.03, -0.02, 0.03, 0.5;
  const SpatialInertia I = SpatialInertia::from_params(2.0, {0.1, -0.2, 0.3}, Ic);
  const SpatialInertia J = SpatialInertia::from_vector(I.to_vector());
  EXPECT_DOUBLE_EQ(J.mass, 2.0);
  EXPECT_LT((J.h - Eigen::Vector3d(0.2, -0.4, 0.6)).norm(), 1e-15);
  EXPECT_LT((J.I - I.I).norm(), 1e-15);
  EXPECT_LT((I.matrix() - I.matrix().transpose()).norm(), 1e-15);
}

TEST(Spatial, InertiaToParentMatchesMatrixCongruence)
{
  std::mt19937 rng(11);
  const Transform X = random_transform(rng);
  const SpatialInertia I = SpatialInertia::from_params(1.5, {0.1, 0.0, -0.3}, Eigen::Matrix3d::Identity());
  // Kinetic energy must not depend on the frame: v_child' I v_child = v_parent' I_parent v_parent.
  const Vector6d v_parent = random_vector(rng, 6);
  const Vector6d v_child = X.motion_to_child(v_parent);
  const SpatialInertia P = I.to_parent(X);
  EXPECT_NEAR(v_child.dot(I * v_child), v_parent.dot(P * v_parent), 1e-12);
}

TEST(Spatial, BodyRegressorIsLinearInParameters)
{
  std::mt19937 rng(13);
  const Vector6d a = random_vector(rng, 6), v = random_vector(rng, 6);
  Eigen::Matrix3d Io;
  Io << 0.5, 0.02, 0.0, 0.02, 0.6, -0.01, 0.0, -0.01, 0.4;
  const SpatialInertia I{2.0, Eigen::Vector3d(0.1, 0.2, -0.1), Io};
  const Vector6d expected = I * a + cross_force(v, I * v);
  EXPECT_LT((body_regressor(a, v) * I.to_vector() - expected).norm(), 1e-12);
}
