#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wbc/qp.hpp"

namespace wbc {

/// One priority level: task A x = b (least squares) and constraints D x <= f.
struct Level
{
  std::string name;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd D;
  Eigen::VectorXd f;

  /// Empty task and constraint blocks with n_x columns.
  static Level empty(int n_x, std::string name = {});
};

struct LevelDiagnostics
{
  double residual_sq = 0.0;
  /// Active rows of the accumulated constraint stack [D_1; ...; D_p].
  std::vector<int> active_constraints;
  int nullspace_dim = 0;
  int iterations = 0;
  bool solved = false;
};

struct HqpSolution
{
  Eigen::VectorXd x;
  std::vector<LevelDiagnostics> per_level;
  int iterations = 0;
  double solve_time = 0.0;       // seconds
  double qp_time = 0.0;          // seconds spent inside the QP solver
  double projection_time = 0.0;  // seconds spent on null-space projections
  /// Set when a level below the first was infeasible; x is the solution of
  /// the last feasible level.
  bool degraded = false;
  int failed_level = -1;
  int violated_constraint = -1;  // row of the failed level's accumulated stack
};

class HqpError : public std::runtime_error
{
public:
  HqpError(const std::string& what, int level, int constraint)
    : std::runtime_error(what), level_(level), constraint_(constraint)
  {
  }
  int level() const { return level_; }
  int constraint() const { return constraint_; }

private:
  int level_;
  int constraint_;
};

/// Relative rank cutoff used for null-space computations.
inline constexpr double kRankTolerance = 1e-8;

/// N_prev (I - pinv(A_hat) A_hat), with the pseudo-inverse from a complete
/// orthogonal decomposition truncated at tol * (largest pivot).
Eigen::MatrixXd nullspace_basis_update(const Eigen::MatrixXd& N_prev, const Eigen::MatrixXd& A_hat,
                                       double tol = kRankTolerance);

/// Strict-priority hierarchy. Level p is solved in the null space of the
/// tasks of levels 1..p-1, subject to the constraints of levels 1..p.
/// Throws HqpError if the first level is infeasible.
HqpSolution solve_hierarchy(const std::vector<Level>& levels, int n_x);

/// Single QP minimizing sum_p w_p |A_p x - b_p|^2 under all constraints.
/// Throws HqpError if the stacked constraints are infeasible.
HqpSolution solve_weighted(const std::vector<Level>& levels, std::span<const double> weights, int n_x);

/// Hierarchy solver that remembers each level's active set and uses it to
/// warm start the next solve of a hierarchy with the same shape.
class HqpSolver
{
public:
  HqpSolution solve(const std::vector<Level>& levels, int n_x);
  void set_warm_start(bool enabled) { warm_start_ = enabled; }
  void reset() { previous_.clear(); }

private:
  bool warm_start_ = true;
  std::vector<std::vector<int>> previous_;
  std::vector<std::pair<long, long>> shape_;
};

}  // namespace wbc
