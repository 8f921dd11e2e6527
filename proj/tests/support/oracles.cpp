#include "oracles.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wbc::test {

namespace {

Eigen::Isometry3d origin_transform(const JointParams& j)
{
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.translate(j.origin_xyz);
  T.rotate(Eigen::AngleAxisd(j.origin_rpy.z(), Eigen::Vector3d::UnitZ()) *
           Eigen::AngleAxisd(j.origin_rpy.y(), Eigen::Vector3d::UnitY()) *
           Eigen::AngleAxisd(j.origin_rpy.x(), Eigen::Vector3d::UnitX()));
  return T;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& A)
{
  if (A.size() == 0)
    return Eigen::MatrixXd::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(A.cols(), A.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol)
      S(i, i) = 1.0 / s(i);
  return svd.matrixV() * S * svd.matrixU().transpose();
}

// min |A x - b|^2 s.t. E x = e; false if the equalities are inconsistent.
bool equality_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::MatrixXd& E,
                 const Eigen::VectorXd& e, int n, Eigen::VectorXd& x)
{
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  if (E.rows() > 0) {
    const Eigen::MatrixXd Ep = pinv(E);
    x0 = Ep * e;
    if ((E * x0 - e).cwiseAbs().maxCoeff() > 1e-9)
      return false;
    P -= Ep * E;
  }
  if (A.rows() > 0)
    x = x0 + pinv(A * P) * (b - A * x0);
  else
    x = x0;
  return true;
}

}  // namespace

Eigen::Isometry3d chain_pose(const RobotModel& model, const RobotState& state, int link)
{
  std::vector<int> path;
  for (int l = link; l >= 0; l = model.parent_link(l))
    path.push_back(l);
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  if (model.floating_base()) {
    T.translate(state.base_position);
    T.rotate(state.base_orientation);
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const int j = model.inbound_joint(*it);
    if (j < 0)
      continue;
    const JointParams& jp = model.joint(j);
    T = T * origin_transform(jp) * Eigen::AngleAxisd(state.q(j), jp.axis.normalized());
  }
  return T;
}

Eigen::MatrixXd PlanarChain::mass_matrix(const Eigen::VectorXd& q) const
{
  const int n = links;
  Eigen::VectorXd phi(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    phi(i) = acc += q(i);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // Jacobian of the CoM of rod i in the (x, z) plane, and of its angle.
    Eigen::MatrixXd Jv = Eigen::MatrixXd::Zero(2, n);
    Eigen::RowVectorXd Jw = Eigen::RowVectorXd::Zero(n);
    for (int j = 0; j <= i; ++j) {
      for (int k = j; k < i; ++k)
        Jv.col(j) += length * Eigen::Vector2d(std::cos(phi(k)), std::sin(phi(k)));
      Jv.col(j) += 0.5 * length * Eigen::Vector2d(std::cos(phi(i)), std::sin(phi(i)));
      Jw(j) = 1.0;
    }
    M += mass * Jv.transpose() * Jv + inertia_com() * Jw.transpose() * Jw;
  }
  return M;
}

Eigen::VectorXd PlanarChain::gravity(const Eigen::VectorXd& q) const
{
  // V = sum m g z_i with z_i = -sum_{k<i} l cos(phi_k) - l/2 cos(phi_i).
  const int n = links;
  Eigen::VectorXd phi(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    phi(i) = acc += q(i);
  Eigen::VectorXd G = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double dz = 0.0;
      for (int k = j; k < i; ++k)
        dz += length * std::sin(phi(k));
      dz += 0.5 * length * std::sin(phi(i));
      G(j) += mass * g * dz;
    }
  return G;
}

Eigen::VectorXd PlanarChain::coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& dq) const
{
  // c_i = sum_jk (dM_ij/dq_k - 1/2 dM_jk/dq_i) dq_j dq_k. M is a trigonometric
  // polynomial; a central difference with h = 1e-5 is accurate to ~1e-11.
  const int n = links;
  const double h = 1e-5;
  std::vector<Eigen::MatrixXd> dM(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd qp = q, qm = q;
    qp(k) += h;
    qm(k) -= h;
    dM[k] = (mass_matrix(qp) - mass_matrix(qm)) / (2 * h);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        c(i) += (dM[k](i, j) - 0.5 * dM[i](j, k)) * dq(j) * dq(k);
  return c;
}

Eigen::Vector2d PlanarChain::tip_bias_acceleration(const Eigen::VectorXd& q,
                                                   const Eigen::VectorXd& dq) const
{
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  double phi = 0.0, dphi = 0.0;
  for (int i = 0; i < links; ++i) {
    phi += q(i);
    dphi += dq(i);
    a += length * dphi * dphi * Eigen::Vector2d(-std::sin(phi), std::cos(phi));
  }
  return a;
}

double PlanarChain::energy(const Eigen::VectorXd& q, const Eigen::VectorXd& dq) const
{
  double V = 0.0, phi = 0.0, z = 0.0;
  for (int i = 0; i < links; ++i) {
    phi += q(i);
    V += mass * g * (z - 0.5 * length * std::cos(phi));
    z -= length * std::cos(phi);
  }
  return 0.5 * dq.dot(mass_matrix(q) * dq) + V;
}

std::vector<double> lexicographic_oracle(const std::vector<Level>& levels, int n_x, Eigen::VectorXd* x_out)
{
  Eigen::MatrixXd E(0, n_x);  // accumulated task equalities A_k x = y_k
  Eigen::VectorXd e(0);
  Eigen::MatrixXd D(0, n_x);
  Eigen::VectorXd f(0);
  std::vector<double> residuals;
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(n_x);

  for (const Level& level : levels) {
    D.conservativeResize(D.rows() + level.D.rows(), n_x);
    D.bottomRows(level.D.rows()) = level.D;
    f.conservativeResize(f.rows() + level.f.rows());
    f.tail(level.f.rows()) = level.f;

    const int m = static_cast<int>(D.rows());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      Eigen::MatrixXd Eq = E;
      Eigen::VectorXd eq = e;
      for (int r = 0; r < m; ++r)
        if (mask & (1u << r)) {
          Eq.conservativeResize(Eq.rows() + 1, n_x);
          Eq.bottomRows(1) = D.row(r);
          eq.conservativeResize(eq.rows() + 1);
          eq(eq.rows() - 1) = f(r);
        }
      Eigen::VectorXd x;
      if (!equality_ls(level.A, level.b, Eq, eq, n_x, x))
        continue;
      if (m > 0 && (D * x - f).maxCoeff() > 1e-9)
        continue;
      const double r = level.A.rows() ? (level.A * x - level.b).squaredNorm() : 0.0;
      if (r < best - 1e-13) {
        best = r;
        best_x = x;
      }
    }
    residuals.push_back(best);
    if (!std::isfinite(best)) {
      residuals.resize(levels.size(), best);
      break;
    }
    if (level.A.rows() > 0) {
      E.conservativeResize(E.rows() + level.A.rows(), n_x);
      E.bottomRows(level.A.rows()) = level.A;
      e.conservativeResize(e.rows() + level.A.rows());
      e.tail(level.A.rows()) = level.A * best_x;
    }
  }
  if (x_out)
    *x_out = best_x;
  return residuals;
}

Eigen::VectorXd dual_gradient_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                                 const Eigen::MatrixXd& D, const Eigen::VectorXd& f, int iterations)
{
  const Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (D.rows() == 0)
    return -llt.solve(g);
  // Dual: max_{l >= 0} -1/2 l' Q l - l' c with Q = D H^-1 D', c = f + D H^-1 g.
  const Eigen::MatrixXd HiDt = llt.solve(D.transpose());
  const Eigen::MatrixXd Q = D * HiDt;
  const Eigen::VectorXd c = f + D * llt.solve(g);
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(D.rows());
  Eigen::VectorXd y = lambda;
  double t = 1.0;
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd next = (y - (Q * y + c) / L).cwiseMax(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - lambda);
    lambda = next;
    t = t_next;
  }
  return -llt.solve(g + D.transpose() * lambda);
}

}  // namespace wbc::test
