#include "random_problems.hpp"

#include <algorithm>

#include <Eigen/Geometry>

namespace wbc::test {

Eigen::MatrixXd random_matrix(std::mt19937& rng, int rows, int cols, double scale)
{
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      M(i, j) = n(rng);
  return M;
}

Eigen::VectorXd random_vector(std::mt19937& rng, int n, double scale)
{
  return random_matrix(rng, n, 1, scale).col(0);
}

std::vector<Level> random_hierarchy(std::mt19937& rng, int n_x, const std::vector<int>& task_rows,
                                    const std::vector<int>& constraint_rows)
{
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  const Eigen::VectorXd interior = random_vector(rng, n_x, 0.5);
  std::vector<Level> levels;
  for (std::size_t p = 0; p < task_rows.size(); ++p) {
    Level l = Level::empty(n_x, "level" + std::to_string(p + 1));
    l.A = random_matrix(rng, task_rows[p], n_x);
    l.b = random_vector(rng, task_rows[p], 2.0);
    const int m = p < constraint_rows.size() ? constraint_rows[p] : 0;
    l.D = random_matrix(rng, m, n_x);
    l.f = l.D * interior;
    for (int i = 0; i < m; ++i)
      l.f(i) += slack(rng);
    levels.push_back(std::move(l));
  }
  return levels;
}

std::vector<Level> random_wbc_shaped_hierarchy(std::mt19937& rng)
{
  std::vector<Level> levels = random_hierarchy(rng, 30, {6, 12, 3, 15}, {24, 18, 0, 0});
  // Like the dynamics level, the top task is consistent: it has an exact
  // solution strictly inside every constraint, so level 2 stays feasible.
  const Eigen::VectorXd x0 = random_vector(rng, 30, 0.5);
  for (Level& l : levels)
    if (l.D.rows() > 0)
      l.f = l.D * x0 + random_vector(rng, static_cast<int>(l.D.rows())).cwiseAbs();
  levels[0].b = levels[0].A * x0;
  return levels;
}

std::vector<Level> random_small_hierarchy(std::mt19937& rng, int& n_x)
{
  std::uniform_int_distribution<int> dim(2, 6), count(1, 3);
  n_x = dim(rng);
  const int levels = count(rng);
  std::vector<int> tasks, constraints;
  int budget = std::uniform_int_distribution<int>(0, 8)(rng);
  for (int p = 0; p < levels; ++p) {
    tasks.push_back(std::uniform_int_distribution<int>(1, n_x)(rng));
    const int c = p + 1 == levels ? budget : std::uniform_int_distribution<int>(0, budget)(rng);
    constraints.push_back(c);
    budget -= c;
  }
  return random_hierarchy(rng, n_x, tasks, constraints);
}

RobotState random_state(const RobotModel& model, std::mt19937& rng, double speed)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RobotState s = RobotState::zero(model);
  for (int j = 0; j < model.num_joints(); ++j) {
    const JointParams& jp = model.joint(j);
    const double lo = std::max(jp.position_min, -M_PI), hi = std::min(jp.position_max, M_PI);
    s.q(j) = lo + (hi - lo) * u(rng);
    s.dq(j) = speed * (2.0 * u(rng) - 1.0);
  }
  if (model.floating_base()) {
    s.base_position = random_vector(rng, 3, 0.3) + Eigen::Vector3d(0, 0, 1);
    const Eigen::VectorXd r = random_vector(rng, 4);
    s.base_orientation = Eigen::Quaterniond(r(0), r(1), r(2), r(3)).normalized();
    s.base_twist = random_vector(rng, 6, speed * 0.5);
  }
  return s;
}

}  // namespace wbc::test
