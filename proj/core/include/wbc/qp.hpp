#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wbc {

enum class QpStatus
{
  kOptimal,
  kInfeasible,
  kIterationLimit,
};

const char* to_string(QpStatus status);

struct QpResult
{
  QpStatus status = QpStatus::kOptimal;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;        // one multiplier per constraint row, 0 if inactive
  std::vector<int> active;       // active constraint rows, ascending
  int iterations = 0;
  int violated_constraint = -1;  // constraint that could not be satisfied
  bool ok() const { return status == QpStatus::kOptimal; }
};

/// Regularization added to the Hessian of every QP.
inline constexpr double kQpRegularization = 1e-10;

/// Dense strictly convex QP
///   min 1/2 x'Hx + g'x  s.t.  D x <= f
/// solved by the Goldfarb-Idnani dual active-set method. H is regularized
/// with kQpRegularization * I before factorization. `warm_start` lists
/// constraint rows expected to be active; they are tried first and silently
/// discarded if they do not form a dual-feasible start.
QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& D,
                  const Eigen::VectorXd& f, std::span<const int> warm_start = {});

/// Same as solve_qp with the Hessian given by an invertible upper-triangular
/// factor, H = R'R. No regularization is added.
QpResult solve_qp_factored(const Eigen::MatrixXd& R, const Eigen::VectorXd& g,
                           const Eigen::MatrixXd& D, const Eigen::VectorXd& f,
                           std::span<const int> warm_start = {});

}  // namespace wbc
