#include "wbc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace wbc {

const char* to_string(QpStatus status)
{
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kIterationLimit: return "iteration limit";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDependenceTol = 1e-11;
constexpr double kDegenerateTol = 1e-9;

// Goldfarb-Idnani in the "n'x >= b" convention. Constraint rows are
// normalized, so slacks are distances in x-space.
class DualActiveSet
{
public:
  DualActiveSet(const Eigen::MatrixXd& R, const Eigen::VectorXd& g, const Eigen::MatrixXd& D,
                const Eigen::VectorXd& f)
    : n_(static_cast<int>(g.size())), m_(static_cast<int>(D.rows())), g_(g)
  {
    if (R.rows() != n_ || R.cols() != n_)
      throw std::invalid_argument("qp: Hessian factor has wrong size");
    if (D.cols() != n_ && m_ > 0)
      throw std::invalid_argument("qp: constraint matrix has wrong column count");
    if (f.size() != m_)
      throw std::invalid_argument("qp: constraint bound has wrong size");

    J_ = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n_, n_));
    N_.resize(n_, m_);
    b_.resize(m_);
    scale_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const double norm = D.row(i).norm();
      scale_(i) = norm;
      if (norm > 0.0) {
        N_.col(i) = -D.row(i).transpose() / norm;
        b_(i) = -f(i) / norm;
      } else {
        N_.col(i).setZero();
        b_(i) = 0.0;
        if (f(i) < 0.0 && zero_row_violation_ < 0)
          zero_row_violation_ = i;
      }
    }
    R_.setZero(n_, n_);
    d_.resize(n_);
    z_.resize(n_);
    r_.resize(n_);
    u_.resize(n_);
    J0_ = J_;
  }

  QpResult solve(std::span<const int> warm_start)
  {
    QpResult res;
    if (zero_row_violation_ >= 0) {
      res.status = QpStatus::kInfeasible;
      res.violated_constraint = zero_row_violation_;
      res.x = -J_ * (J_.transpose() * g_);
      finish(res);
      return res;
    }
    skipped_.assign(m_, false);
    cold_start();
    if (!warm_start.empty() && !try_warm_start(warm_start))
      cold_start();

    const int max_iterations = 10 * (n_ + m_) + 10;
    int iterations = 0;
  restart:
    for (;;) {
      // Most violated constraint among the inactive ones.
      int p = -1;
      double s_min = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (is_active_[i] || skipped_[i] || scale_(i) == 0.0)
          continue;
        const double s = N_.col(i).dot(x_) - b_(i);
        const double tol = 1e-11 * (1.0 + std::abs(b_(i)));
        if (s < -tol && s < s_min) {
          s_min = s;
          p = i;
        }
      }
      if (p < 0)
        break;

      double s_p = s_min;
      double u_p = 0.0;
      for (;;) {
        if (++iterations > max_iterations) {
          res.status = QpStatus::kIterationLimit;
          res.violated_constraint = p;
          res.iterations = iterations;
          finish(res);
          return res;
        }
        const bool has_primal_step = step_directions(N_.col(p));
        double t1 = kInf;
        int l = -1;
        for (int j = 0; j < q_; ++j) {
          if (r_(j) > 0.0) {
            const double ratio = u_(j) / r_(j);
            if (ratio < t1) {
              t1 = ratio;
              l = j;
            }
          }
        }
        const double t2 = has_primal_step ? -s_p / z_.dot(N_.col(p)) : kInf;
        const double t = std::min(t1, t2);
        if (t == kInf) {
          // A violation at rounding level on a degenerate vertex: accept the
          // row as satisfied and start over without it.
          if (s_p >= -kDegenerateTol * (1.0 + std::abs(b_(p)))) {
            skipped_[p] = true;
            cold_start();
            goto restart;
          }
          res.status = QpStatus::kInfeasible;
          res.violated_constraint = p;
          res.iterations = iterations;
          finish(res);
          return res;
        }
        u_.head(q_) -= t * r_.head(q_);
        u_p += t;
        if (t2 == kInf) {
          drop(l);
          continue;
        }
        x_ += t * z_;
        if (t2 <= t1) {
          add(p, u_p);
          break;
        }
        drop(l);
        s_p = N_.col(p).dot(x_) - b_(p);
      }
    }
    res.iterations = iterations;
    res.status = QpStatus::kOptimal;
    finish(res);
    return res;
  }

private:
  void cold_start()
  {
    J_ = J0_;
    q_ = 0;
    active_.clear();
    is_active_.assign(m_, false);
    x_ = -J_ * (J_.transpose() * g_);
  }

  // Adds the warm-start rows as equalities. Returns false if the resulting
  // multipliers are not all non-negative.
  bool try_warm_start(std::span<const int> rows)
  {
    for (int p : rows) {
      if (p < 0 || p >= m_ || is_active_[p] || scale_(p) == 0.0 || q_ >= n_)
        continue;
      if (!step_directions(N_.col(p)))
        continue;
      const double s_p = N_.col(p).dot(x_) - b_(p);
      const double t = -s_p / z_.dot(N_.col(p));
      x_ += t * z_;
      u_.head(q_) -= t * r_.head(q_);
      add(p, t);
    }
    for (int j = 0; j < q_; ++j)
      if (u_(j) < 0.0)
        return false;
    return true;
  }

  // d = J'n, z = J2 d2 (primal direction), r = R^-1 d1 (dual direction).
  // Returns false when n is linearly dependent on the active normals.
  bool step_directions(const Eigen::Ref<const Eigen::VectorXd>& normal)
  {
    d_.noalias() = J_.transpose() * normal;
    const int free = n_ - q_;
    const double d2 = free > 0 ? d_.tail(free).norm() : 0.0;
    if (q_ > 0)
      r_.head(q_) = R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d_.head(q_));
    if (free == 0 || d2 <= kDependenceTol * d_.norm()) {
      z_.setZero();
      return false;
    }
    z_.noalias() = J_.rightCols(free) * d_.tail(free);
    return true;
  }

  void rotate_columns(int a, int b, double c, double s)
  {
    for (int k = 0; k < n_; ++k) {
      const double ja = J_(k, a), jb = J_(k, b);
      J_(k, a) = c * ja + s * jb;
      J_(k, b) = -s * ja + c * jb;
    }
  }

  void add(int p, double multiplier)
  {
    for (int j = n_ - 1; j > q_; --j) {
      const double h = std::hypot(d_(j - 1), d_(j));
      if (h == 0.0)
        continue;
      const double c = d_(j - 1) / h, s = d_(j) / h;
      d_(j - 1) = h;
      d_(j) = 0.0;
      rotate_columns(j - 1, j, c, s);
    }
    R_.col(q_).head(q_ + 1) = d_.head(q_ + 1);
    u_(q_) = multiplier;
    active_.push_back(p);
    is_active_[p] = true;
    ++q_;
  }

  void drop(int slot)
  {
    is_active_[active_[slot]] = false;
    active_.erase(active_.begin() + slot);
    for (int j = slot; j < q_ - 1; ++j) {
      R_.col(j).head(j + 2) = R_.col(j + 1).head(j + 2);
      u_(j) = u_(j + 1);
    }
    R_.col(q_ - 1).setZero();
    --q_;
    // Restore triangularity of the Hessenberg part.
    for (int i = slot; i < q_; ++i) {
      const double h = std::hypot(R_(i, i), R_(i + 1, i));
      if (h == 0.0)
        continue;
      const double c = R_(i, i) / h, s = R_(i + 1, i) / h;
      for (int k = i; k < q_; ++k) {
        const double ra = R_(i, k), rb = R_(i + 1, k);
        R_(i, k) = c * ra + s * rb;
        R_(i + 1, k) = -s * ra + c * rb;
      }
      R_(i + 1, i) = 0.0;
      rotate_columns(i, i + 1, c, s);
    }
    R_.row(q_).setZero();
  }

  void finish(QpResult& res) const
  {
    if (res.x.size() == 0)
      res.x = x_;
    res.lambda = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < q_; ++j)
      res.lambda(active_[j]) = u_(j) / scale_(active_[j]);
    res.active = active_;
    std::sort(res.active.begin(), res.active.end());
  }

  int n_, m_;
  Eigen::VectorXd g_;
  Eigen::MatrixXd J0_, J_, N_, R_;
  Eigen::VectorXd b_, scale_, x_, d_, z_, r_, u_;
  std::vector<int> active_;
  std::vector<bool> is_active_, skipped_;
  int q_ = 0;
  int zero_row_violation_ = -1;
};

}  // namespace

QpResult solve_qp_factored(const Eigen::MatrixXd& R, const Eigen::VectorXd& g,
                           const Eigen::MatrixXd& D, const Eigen::VectorXd& f,
                           std::span<const int> warm_start)
{
  DualActiveSet solver(R, g, D.rows() == 0 ? Eigen::MatrixXd(0, g.size()) : D, f);
  return solver.solve(warm_start);
}

QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& D,
                  const Eigen::VectorXd& f, std::span<const int> warm_start)
{
  const auto n = g.size();
  if (H.rows() != n || H.cols() != n)
    throw std::invalid_argument("qp: Hessian has wrong size");
  Eigen::LLT<Eigen::MatrixXd> llt(H + kQpRegularization * Eigen::MatrixXd::Identity(n, n));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("qp: Hessian is not positive semi-definite");
  const Eigen::MatrixXd R = llt.matrixU();
  return solve_qp_factored(R, g, D, f, warm_start);
}

}  // namespace wbc
