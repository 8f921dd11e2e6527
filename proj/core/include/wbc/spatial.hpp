#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wbc {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Matrix3Xd = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Vector10d = Eigen::Matrix<double, 10, 1>;
using Matrix6x10d = Eigen::Matrix<double, 6, 10>;

// Spatial vectors are stored angular part first: motion = [w; v], force = [n; f].

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

Eigen::Matrix3d rpy_to_matrix(const Eigen::Vector3d& rpy);

// Axis-angle vector of a rotation matrix (inverse of exp_so3).
Eigen::Vector3d log_so3(const Eigen::Matrix3d& R);
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w);

/// Rigid transform giving the pose of a frame B relative to a frame A:
/// x_A = R * x_B + p.
struct Transform
{
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();

  static Transform identity() { return {}; }
  static Transform from_xyz_rpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy);

  Transform operator*(const Transform& other) const { return {R * other.R, p + R * other.p}; }
  Transform inverse() const { return {R.transpose(), -R.transpose() * p}; }
  Eigen::Vector3d act(const Eigen::Vector3d& x) const { return R * x + p; }

  // Motion/force expressed at A's origin in A coordinates -> at B's origin in B coordinates.
  Vector6d motion_to_child(const Vector6d& m) const;
  Vector6d force_to_child(const Vector6d& f) const;
  // Inverse mappings (B -> A).
  Vector6d motion_to_parent(const Vector6d& m) const;
  Vector6d force_to_parent(const Vector6d& f) const;

  /// 6x6 matrix of motion_to_child.
  Matrix6d motion_matrix_to_child() const;
};

Vector6d cross_motion(const Vector6d& v, const Vector6d& m);
Vector6d cross_force(const Vector6d& v, const Vector6d& f);

/// Rigid-body inertia about the body frame origin: mass, first moment h = m*c
/// and rotational inertia I_o about the origin.
struct SpatialInertia
{
  double mass = 0.0;
  Eigen::Vector3d h = Eigen::Vector3d::Zero();
  Eigen::Matrix3d I = Eigen::Matrix3d::Zero();

  static SpatialInertia from_params(double mass, const Eigen::Vector3d& com,
                                    const Eigen::Matrix3d& inertia_origin);
  /// Parameter vector [m, hx, hy, hz, ixx, ixy, ixz, iyy, iyz, izz].
  static SpatialInertia from_vector(const Vector10d& pi);
  Vector10d to_vector() const;

  Vector6d operator*(const Vector6d& v) const;
  SpatialInertia operator+(const SpatialInertia& o) const { return {mass + o.mass, h + o.h, I + o.I}; }
  SpatialInertia& operator+=(const SpatialInertia& o);
  Matrix6d matrix() const;

  /// Same inertia expressed in the parent frame A, given the pose of this frame in A.
  SpatialInertia to_parent(const Transform& pose_in_parent) const;
};

/// Linear map A(a, v) such that I*a + v x* (I*v) = A * pi for any body
/// parameter vector pi.
Matrix6x10d body_regressor(const Vector6d& a, const Vector6d& v);

}  // namespace wbc
