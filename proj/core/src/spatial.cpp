#include "wbc/spatial.hpp"

#include <cmath>

namespace wbc {

Eigen::Matrix3d skew(const Eigen::Vector3d& v)
{
  Eigen::Matrix3d S;
  S << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return S;
}

Eigen::Matrix3d rpy_to_matrix(const Eigen::Vector3d& rpy)
{
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Vector3d log_so3(const Eigen::Matrix3d& R)
{
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w)
{
  const double angle = w.norm();
  if (angle < 1e-14)
    return Eigen::Matrix3d::Identity() + skew(w);
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Transform Transform::from_xyz_rpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy)
{
  return {rpy_to_matrix(rpy), xyz};
}

Vector6d Transform::motion_to_child(const Vector6d& m) const
{
  const Eigen::Vector3d w = m.head<3>();
  const Eigen::Vector3d v = m.tail<3>();
  Vector6d out;
  out.head<3>() = R.transpose() * w;
  out.tail<3>() = R.transpose() * (v + w.cross(p));
  return out;
}

Vector6d Transform::force_to_child(const Vector6d& f) const
{
  const Eigen::Vector3d n = f.head<3>();
  const Eigen::Vector3d lin = f.tail<3>();
  Vector6d out;
  out.head<3>() = R.transpose() * (n - p.cross(lin));
  out.tail<3>() = R.transpose() * lin;
  return out;
}

Vector6d Transform::motion_to_parent(const Vector6d& m) const
{
  Vector6d out;
  out.head<3>() = R * m.head<3>();
  out.tail<3>() = R * m.tail<3>() + p.cross(out.head<3>());
  return out;
}

Vector6d Transform::force_to_parent(const Vector6d& f) const
{
  Vector6d out;
  out.tail<3>() = R * f.tail<3>();
  out.head<3>() = R * f.head<3>() + p.cross(out.tail<3>());
  return out;
}

Matrix6d Transform::motion_matrix_to_child() const
{
  Matrix6d X = Matrix6d::Zero();
  const Eigen::Matrix3d Rt = R.transpose();
  X.topLeftCorner<3, 3>() = Rt;
  X.bottomRightCorner<3, 3>() = Rt;
  X.bottomLeftCorner<3, 3>() = -Rt * skew(p);
  return X;
}

Vector6d cross_motion(const Vector6d& v, const Vector6d& m)
{
  const Eigen::Vector3d w = v.head<3>();
  Vector6d out;
  out.head<3>() = w.cross(m.head<3>());
  out.tail<3>() = w.cross(m.tail<3>()) + v.tail<3>().cross(m.head<3>());
  return out;
}

Vector6d cross_force(const Vector6d& v, const Vector6d& f)
{
  const Eigen::Vector3d w = v.head<3>();
  Vector6d out;
  out.head<3>() = w.cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  out.tail<3>() = w.cross(f.tail<3>());
  return out;
}

SpatialInertia SpatialInertia::from_params(double mass, const Eigen::Vector3d& com,
                                           const Eigen::Matrix3d& inertia_origin)
{
  return {mass, mass * com, inertia_origin};
}

SpatialInertia SpatialInertia::from_vector(const Vector10d& pi)
{
  SpatialInertia out;
  out.mass = pi(0);
  out.h = pi.segment<3>(1);
  out.I << pi(4), pi(5), pi(6),
           pi(5), pi(7), pi(8),
           pi(6), pi(8), pi(9);
  return out;
}

Vector10d SpatialInertia::to_vector() const
{
  Vector10d pi;
  pi << mass, h.x(), h.y(), h.z(), I(0, 0), I(0, 1), I(0, 2), I(1, 1), I(1, 2), I(2, 2);
  return pi;
}

Vector6d SpatialInertia::operator*(const Vector6d& v) const
{
  const Eigen::Vector3d w = v.head<3>();
  const Eigen::Vector3d lin = v.tail<3>();
  Vector6d out;
  out.head<3>() = I * w + h.cross(lin);
  out.tail<3>() = mass * lin - h.cross(w);
  return out;
}

SpatialInertia& SpatialInertia::operator+=(const SpatialInertia& o)
{
  mass += o.mass;
  h += o.h;
  I += o.I;
  return *this;
}

Matrix6d SpatialInertia::matrix() const
{
  Matrix6d M;
  const Eigen::Matrix3d H = skew(h);
  M.topLeftCorner<3, 3>() = I;
  M.topRightCorner<3, 3>() = H;
  M.bottomLeftCorner<3, 3>() = H.transpose();
  M.bottomRightCorner<3, 3>() = mass * Eigen::Matrix3d::Identity();
  return M;
}

SpatialInertia SpatialInertia::to_parent(const Transform& pose) const
{
  // Rotate about the origin, then shift the reference point by p. Written in
  // terms of h so that it also holds for zero mass.
  const Eigen::Matrix3d Ir = pose.R * I * pose.R.transpose();
  const Eigen::Vector3d hr = pose.R * h;
  const Eigen::Matrix3d P = skew(pose.p);
  const Eigen::Matrix3d Hr = skew(hr);
  SpatialInertia out;
  out.mass = mass;
  out.h = hr + mass * pose.p;
  out.I = Ir - P * Hr - Hr * P - mass * P * P;
  return out;
}

Matrix6x10d body_regressor(const Vector6d& a, const Vector6d& v)
{
  Matrix6x10d A;
  for (int k = 0; k < 10; ++k) {
    const SpatialInertia unit = SpatialInertia::from_vector(Vector10d::Unit(k));
    A.col(k) = unit * a + cross_force(v, unit * v);
  }
  return A;
}

}  // namespace wbc
