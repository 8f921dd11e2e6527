#include "wbc/hqp.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/QR>

namespace wbc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void validate(const std::vector<Level>& levels, int n_x)
{
  if (levels.empty())
    throw std::invalid_argument("hierarchy has no levels");
  if (n_x <= 0)
    throw std::invalid_argument("hierarchy needs at least one variable");
  for (std::size_t p = 0; p < levels.size(); ++p) {
    const Level& l = levels[p];
    const std::string where = "level " + std::to_string(p + 1) +
                              (l.name.empty() ? std::string() : " (" + l.name + ")");
    if (l.A.rows() > 0 && l.A.cols() != n_x)
      throw std::invalid_argument(where + ": task matrix has " + std::to_string(l.A.cols()) +
                                  " columns, expected " + std::to_string(n_x));
    if (l.b.size() != l.A.rows())
      throw std::invalid_argument(where + ": task vector has " + std::to_string(l.b.size()) +
                                  " entries, expected " + std::to_string(l.A.rows()));
    if (l.D.rows() > 0 && l.D.cols() != n_x)
      throw std::invalid_argument(where + ": constraint matrix has " + std::to_string(l.D.cols()) +
                                  " columns, expected " + std::to_string(n_x));
    if (l.f.size() != l.D.rows())
      throw std::invalid_argument(where + ": constraint bound has " + std::to_string(l.f.size()) +
                                  " entries, expected " + std::to_string(l.D.rows()));
  }
}

Eigen::MatrixXd task_matrix(const Level& l, int n_x)
{
  return l.A.rows() > 0 ? l.A : Eigen::MatrixXd(0, n_x);
}

// Upper-triangular R with R'R = E'E.
Eigen::MatrixXd triangular_factor(const Eigen::MatrixXd& E)
{
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(E);
  const auto k = E.cols();
  return qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

std::string level_label(const std::vector<Level>& levels, std::size_t p)
{
  std::string s = "level " + std::to_string(p + 1);
  if (!levels[p].name.empty())
    s += " (" + levels[p].name + ")";
  return s;
}

void fill_residuals(const std::vector<Level>& levels, int n_x, HqpSolution& sol)
{
  for (std::size_t p = 0; p < levels.size(); ++p)
    sol.per_level[p].residual_sq = (task_matrix(levels[p], n_x) * sol.x - levels[p].b).squaredNorm();
}

HqpSolution solve_impl(const std::vector<Level>& levels, int n_x,
                       const std::vector<std::vector<int>>* warm)
{
  validate(levels, n_x);
  const auto start = Clock::now();
  const double sqrt_reg = std::sqrt(kQpRegularization);

  HqpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n_x);
  sol.per_level.resize(levels.size());

  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n_x, n_x);
  long total_rows = 0;
  for (const Level& l : levels)
    total_rows += l.D.rows();
  Eigen::MatrixXd D_acc(total_rows, n_x);
  Eigen::VectorXd f_acc(total_rows);
  long m = 0;

  for (std::size_t p = 0; p < levels.size(); ++p) {
    const Level& level = levels[p];
    const Eigen::MatrixXd A = task_matrix(level, n_x);
    const long mc = level.D.rows();
    if (mc > 0) {
      D_acc.middleRows(m, mc) = level.D;
      f_acc.segment(m, mc) = level.f;
    }
    m += mc;
    const long k = Z.cols();
    LevelDiagnostics& diag = sol.per_level[p];

    if (k == 0) {
      // Nothing left to optimize; the new constraints must already hold.
      const Eigen::VectorXd slack = f_acc.head(m) - D_acc.topRows(m) * sol.x;
      long worst = -1;
      for (long i = 0; i < m; ++i)
        if (slack(i) < -1e-9 * (1.0 + std::abs(f_acc(i))) && (worst < 0 || slack(i) < slack(worst)))
          worst = i;
      if (worst >= 0) {
        if (p == 0)
          throw HqpError(level_label(levels, p) + " is infeasible (constraint " +
                             std::to_string(worst) + ")",
                         0, static_cast<int>(worst));
        sol.degraded = true;
        sol.failed_level = static_cast<int>(p);
        sol.violated_constraint = static_cast<int>(worst);
        break;
      }
      diag.solved = true;
      continue;
    }

    auto t0 = Clock::now();
    const Eigen::MatrixXd A_hat = A * Z;
    Eigen::MatrixXd E(A_hat.rows() + k, k);
    E.topRows(A_hat.rows()) = A_hat;
    E.bottomRows(k) = sqrt_reg * Eigen::MatrixXd::Identity(k, k);
    const Eigen::MatrixXd R = triangular_factor(E);
    const Eigen::VectorXd g = -A_hat.transpose() * (level.b - A * sol.x);
    const Eigen::MatrixXd D_hat = D_acc.topRows(m) * Z;
    const Eigen::VectorXd f_hat = f_acc.head(m) - D_acc.topRows(m) * sol.x;
    sol.projection_time += seconds_since(t0);

    std::span<const int> warm_rows;
    if (warm && p < warm->size())
      warm_rows = (*warm)[p];
    t0 = Clock::now();
    QpResult qp = solve_qp_factored(R, g, D_hat, f_hat, warm_rows);
    if (qp.ok()) {
      // A proximal step about the first solution removes the bias the
      // regularization leaves in the task directions.
      QpResult refined = solve_qp_factored(R, g - kQpRegularization * qp.x, D_hat, f_hat, qp.active);
      refined.iterations += qp.iterations;
      if (refined.ok())
        qp = std::move(refined);
    }
    sol.qp_time += seconds_since(t0);
    diag.iterations = qp.iterations;
    sol.iterations += qp.iterations;

    if (!qp.ok()) {
      if (p == 0)
        throw HqpError(level_label(levels, p) + " is infeasible (constraint " +
                           std::to_string(qp.violated_constraint) + ", " + to_string(qp.status) + ")",
                       0, qp.violated_constraint);
      sol.degraded = true;
      sol.failed_level = static_cast<int>(p);
      sol.violated_constraint = qp.violated_constraint;
      break;
    }
    sol.x += Z * qp.x;
    diag.active_constraints = qp.active;
    diag.solved = true;

    t0 = Clock::now();
    if (A_hat.rows() > 0) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A_hat.transpose());
      qr.setThreshold(kRankTolerance);
      const long rank = qr.rank();
      if (rank > 0) {
        const Eigen::MatrixXd Q = qr.householderQ();
        Z = (Z * Q.rightCols(k - rank)).eval();
      }
    }
    sol.projection_time += seconds_since(t0);
    diag.nullspace_dim = static_cast<int>(Z.cols());
  }

  for (auto& d : sol.per_level)
    if (!d.solved)
      d.nullspace_dim = static_cast<int>(Z.cols());
  fill_residuals(levels, n_x, sol);
  sol.solve_time = seconds_since(start);
  return sol;
}

}  // namespace

Level Level::empty(int n_x, std::string name)
{
  Level l;
  l.name = std::move(name);
  l.A.resize(0, n_x);
  l.b.resize(0);
  l.D.resize(0, n_x);
  l.f.resize(0);
  return l;
}

Eigen::MatrixXd nullspace_basis_update(const Eigen::MatrixXd& N_prev, const Eigen::MatrixXd& A_hat,
                                       double tol)
{
  if (A_hat.rows() == 0)
    return N_prev;
  if (A_hat.cols() != N_prev.cols())
    throw std::invalid_argument("nullspace_basis_update: A_hat has " + std::to_string(A_hat.cols()) +
                                " columns, expected " + std::to_string(N_prev.cols()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A_hat.rows(), A_hat.cols());
  cod.setThreshold(tol);
  cod.compute(A_hat);
  if (cod.rank() == 0)
    return N_prev;
  const auto n = A_hat.cols();
  return N_prev * (Eigen::MatrixXd::Identity(n, n) - cod.pseudoInverse() * A_hat);
}

HqpSolution solve_hierarchy(const std::vector<Level>& levels, int n_x)
{
  return solve_impl(levels, n_x, nullptr);
}

HqpSolution solve_weighted(const std::vector<Level>& levels, std::span<const double> weights, int n_x)
{
  validate(levels, n_x);
  if (weights.size() != levels.size())
    throw std::invalid_argument("solve_weighted: need one weight per level");
  for (double w : weights)
    if (!(w > 0.0))
      throw std::invalid_argument("solve_weighted: weights must be positive");
  const auto start = Clock::now();

  long task_rows = 0, constraint_rows = 0;
  for (const Level& l : levels) {
    task_rows += l.A.rows();
    constraint_rows += l.D.rows();
  }
  Eigen::MatrixXd E(task_rows + n_x, n_x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n_x);
  Eigen::MatrixXd D(constraint_rows, n_x);
  Eigen::VectorXd f(constraint_rows);
  long t = 0, c = 0;
  for (std::size_t p = 0; p < levels.size(); ++p) {
    const Level& l = levels[p];
    const double s = std::sqrt(weights[p]);
    if (l.A.rows() > 0) {
      E.middleRows(t, l.A.rows()) = s * l.A;
      g -= weights[p] * l.A.transpose() * l.b;
    }
    t += l.A.rows();
    if (l.D.rows() > 0) {
      D.middleRows(c, l.D.rows()) = l.D;
      f.segment(c, l.D.rows()) = l.f;
    }
    c += l.D.rows();
  }
  E.bottomRows(n_x) = std::sqrt(kQpRegularization) * Eigen::MatrixXd::Identity(n_x, n_x);

  HqpSolution sol;
  auto t0 = Clock::now();
  const Eigen::MatrixXd R = triangular_factor(E);
  sol.projection_time = seconds_since(t0);
  t0 = Clock::now();
  QpResult qp = solve_qp_factored(R, g, D, f);
  if (qp.ok()) {
    QpResult refined = solve_qp_factored(R, g - kQpRegularization * qp.x, D, f, qp.active);
    refined.iterations += qp.iterations;
    if (refined.ok())
      qp = std::move(refined);
  }
  sol.qp_time = seconds_since(t0);
  if (!qp.ok())
    throw HqpError(std::string("weighted problem is infeasible (") + to_string(qp.status) + ")", -1,
                   qp.violated_constraint);

  sol.x = qp.x;
  sol.iterations = qp.iterations;
  sol.per_level.resize(levels.size());
  for (auto& d : sol.per_level) {
    d.nullspace_dim = n_x;
    d.solved = true;
  }
  sol.per_level.back().active_constraints = qp.active;
  sol.per_level.back().iterations = qp.iterations;
  fill_residuals(levels, n_x, sol);
  sol.solve_time = seconds_since(start);
  return sol;
}

HqpSolution HqpSolver::solve(const std::vector<Level>& levels, int n_x)
{
  std::vector<std::pair<long, long>> shape;
  shape.reserve(levels.size() + 1);
  shape.emplace_back(n_x, 0);
  for (const Level& l : levels)
    shape.emplace_back(l.A.rows(), l.D.rows());
  const bool reuse = warm_start_ && shape == shape_ && !previous_.empty();

  HqpSolution sol = solve_impl(levels, n_x, reuse ? &previous_ : nullptr);

  shape_ = std::move(shape);
  previous_.clear();
  for (const auto& d : sol.per_level)
    previous_.push_back(d.active_constraints);
  return sol;
}

}  // namespace wbc
