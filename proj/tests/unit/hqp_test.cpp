#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "random_problems.hpp"
#include "wbc/hqp.hpp"

using namespace wbc;
using wbc::test::random_matrix;
using wbc::test::random_vector;

namespace {

Level task(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
  Level l = Level::empty(static_cast<int>(A.cols()));
  l.A = A;
  l.b = b;
  return l;
}

Eigen::MatrixXd row(std::initializer_list<double> v)
{
  Eigen::MatrixXd r(1, v.size());
  int i = 0;
  for (double x : v)
    r(0, i++) = x;
  return r;
}

Eigen::VectorXd vec(std::initializer_list<double> v)
{
  Eigen::VectorXd r(v.size());
  int i = 0;
  for (double x : v)
    r(i++) = x;
  return r;
}

double max_violation(const std::vector<Level>& levels, const Eigen::VectorXd& x)
{
  double worst = -1e300;
  for (const Level& l : levels)
    if (l.D.rows() > 0)
      worst = std::max(worst, (l.D * x - l.f).maxCoeff());
  return worst;
}

}  // namespace

TEST(Nullspace, FullRankSquareLeavesNothing)
{
  const Eigen::MatrixXd N = nullspace_basis_update(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_LT(N.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Nullspace, AxisProjector)
{
  const Eigen::MatrixXd N = nullspace_basis_update(Eigen::MatrixXd::Identity(2, 2), row({1, 0}));
  EXPECT_LT((N - Eigen::Vector2d(0, 1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Nullspace, RankZeroKeepsPrevious)
{
  std::mt19937 rng(1);
  const Eigen::MatrixXd N = random_matrix(rng, 4, 4);
  EXPECT_EQ(nullspace_basis_update(N, Eigen::MatrixXd::Zero(2, 4)), N);
}

TEST(Nullspace, RankDeficientRandom)
{
  std::mt19937 rng(2);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd A = random_matrix(rng, 5, 3) * random_matrix(rng, 3, 8);  // rank 3
    const Eigen::MatrixXd N = nullspace_basis_update(Eigen::MatrixXd::Identity(8, 8), A);
    EXPECT_LT((A * N).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((N * N - N).cwiseAbs().maxCoeff(), 1e-9);
    // Chained: a second task inside the first null space.
    const Eigen::MatrixXd B = random_matrix(rng, 2, 8);
    const Eigen::MatrixXd N2 = nullspace_basis_update(N, B * N);
    EXPECT_LT((A * N2).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((B * N2).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((N2 * N2 - N2).cwiseAbs().maxCoeff(), 1e-9);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(N2);
    svd.setThreshold(1e-8);
    EXPECT_EQ(svd.rank(), 3);
  }
}

TEST(Hierarchy, SequentialExactSolves)
{
  const std::vector<Level> levels{task(row({1, 0}), vec({1})), task(row({1, 1}), vec({0}))};
  const HqpSolution s = solve_hierarchy(levels, 2);
  EXPECT_NEAR(s.x(0), 1.0, 1e-8);
  EXPECT_NEAR(s.x(1), -1.0, 1e-8);
  EXPECT_LT(s.per_level[0].residual_sq, 1e-16);
  EXPECT_LT(s.per_level[1].residual_sq, 1e-16);
  EXPECT_EQ(s.per_level[0].nullspace_dim, 1);
  EXPECT_EQ(s.per_level[1].nullspace_dim, 0);
}

TEST(Hierarchy, ClampedLowerLevel)
{
  Level l1 = task(row({1, 0}), vec({1}));
  l1.D = row({0, 1});
  l1.f = vec({0.5});
  const std::vector<Level> levels{l1, task(row({0, 1}), vec({2}))};
  const HqpSolution s = solve_hierarchy(levels, 2);
  EXPECT_NEAR(s.x(0), 1.0, 1e-8);
  EXPECT_NEAR(s.x(1), 0.5, 1e-8);
  EXPECT_NEAR(s.per_level[1].residual_sq, 2.25, 1e-8);
  EXPECT_EQ(s.per_level[1].active_constraints, std::vector<int>{0});
}

TEST(Hierarchy, LevelOneInfeasibleThrows)
{
  Level l = task(row({1}), vec({0}));
  l.D.resize(2, 1);
  l.D << 1, -1;
  l.f = vec({-1, -1});
  try {
    solve_hierarchy({l}, 1);
    FAIL();
  } catch (const HqpError& e) {
    EXPECT_EQ(e.level(), 0);
    EXPECT_GE(e.constraint(), 0);
  }
}

TEST(Hierarchy, LaterInfeasibleLevelDegrades)
{
  Level l1 = task(row({1, 0}), vec({1}));
  Level l2 = task(row({0, 1}), vec({0}));
  l2.D.resize(2, 2);
  l2.D << 1, 0, -1, 0;  // pins x1 = 0 while level 1 fixed x1 = 1
  l2.f = vec({0, 0});
  const HqpSolution s = solve_hierarchy({l1, l2}, 2);
  EXPECT_TRUE(s.degraded);
  EXPECT_EQ(s.failed_level, 1);
  EXPECT_NEAR(s.x(0), 1.0, 1e-8);
}

TEST(Hierarchy, DimensionMismatchIsRejected)
{
  Level l = task(row({1, 0, 0}), vec({1}));
  EXPECT_THROW(solve_hierarchy({l}, 2), std::invalid_argument);
}

TEST(Hierarchy, MatchesLexicographicOracle)
{
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    int n_x = 0;
    const std::vector<Level> levels = wbc::test::random_small_hierarchy(rng, n_x);
    const HqpSolution s = solve_hierarchy(levels, n_x);
    const std::vector<double> oracle = wbc::test::lexicographic_oracle(levels, n_x);
    for (std::size_t p = 0; p < levels.size(); ++p) {
      if (!std::isfinite(oracle[p])) {
        // Constraints of this level cannot be met without giving up a higher level.
        EXPECT_TRUE(s.degraded) << "problem " << i;
        EXPECT_EQ(s.failed_level, static_cast<int>(p)) << "problem " << i;
        break;
      }
      EXPECT_NEAR(s.per_level[p].residual_sq, oracle[p], 1e-6) << "problem " << i << " level " << p;
    }
    if (std::isfinite(oracle.back()))
      EXPECT_FALSE(s.degraded) << "problem " << i;
  }
}

TEST(Hierarchy, StrictPriorityUnderPerturbation)
{
  std::mt19937 rng(4);
  for (int i = 0; i < 20; ++i) {
    std::vector<Level> levels = wbc::test::random_wbc_shaped_hierarchy(rng);
    const HqpSolution base = solve_hierarchy(levels, 30);
    EXPECT_LT(max_violation(levels, base.x), 1e-8);
    for (std::size_t k = 1; k < levels.size(); ++k) {
      std::vector<Level> perturbed = levels;
      perturbed[k].b += random_vector(rng, static_cast<int>(perturbed[k].b.size()), 10.0);
      const HqpSolution s = solve_hierarchy(perturbed, 30);
      for (std::size_t j = 0; j < k; ++j)
        EXPECT_NEAR(s.per_level[j].residual_sq, base.per_level[j].residual_sq, 1e-8);
      EXPECT_LT(max_violation(perturbed, s.x), 1e-8);
    }
  }
}

TEST(Hierarchy, NullspaceDimensionsFollowRanks)
{
  std::mt19937 rng(5);
  const std::vector<Level> levels = wbc::test::random_hierarchy(rng, 10, {3, 4, 2, 5}, {0, 0, 0, 0});
  const HqpSolution s = solve_hierarchy(levels, 10);
  EXPECT_EQ(s.per_level[0].nullspace_dim, 7);
  EXPECT_EQ(s.per_level[1].nullspace_dim, 3);
  EXPECT_EQ(s.per_level[2].nullspace_dim, 1);
  EXPECT_EQ(s.per_level[3].nullspace_dim, 0);
  for (std::size_t p = 1; p < s.per_level.size(); ++p)
    EXPECT_LE(s.per_level[p].nullspace_dim, s.per_level[p - 1].nullspace_dim);
}

TEST(Hierarchy, EmptyLevelsAreAllowed)
{
  Level bounds = Level::empty(2, "bounds");
  bounds.D = row({1, 1});
  bounds.f = vec({1});
  const std::vector<Level> levels{bounds, task(row({1, 0}), vec({3})), Level::empty(2)};
  const HqpSolution s = solve_hierarchy(levels, 2);
  EXPECT_LE(s.x.sum(), 1.0 + 1e-9);
  EXPECT_NEAR(s.x(0), 3.0, 1e-8);
}

TEST(Hierarchy, Deterministic)
{
  std::mt19937 rng(6);
  const std::vector<Level> levels = wbc::test::random_wbc_shaped_hierarchy(rng);
  const HqpSolution a = solve_hierarchy(levels, 30), b = solve_hierarchy(levels, 30);
  EXPECT_EQ(a.x, b.x);
}

TEST(Hierarchy, WarmStartedSolverAgrees)
{
  std::mt19937 rng(7);
  std::vector<Level> levels = wbc::test::random_wbc_shaped_hierarchy(rng);
  HqpSolver solver;
  for (int t = 0; t < 20; ++t) {
    for (Level& l : levels)
      l.b += random_vector(rng, static_cast<int>(l.b.size()), 0.01);
    const HqpSolution warm = solver.solve(levels, 30);
    const HqpSolution cold = solve_hierarchy(levels, 30);
    EXPECT_LT((warm.x - cold.x).cwiseAbs().maxCoeff(), 1e-7);
    for (std::size_t p = 0; p < levels.size(); ++p)
      EXPECT_NEAR(warm.per_level[p].residual_sq, cold.per_level[p].residual_sq, 1e-8);
  }
}

TEST(Weighted, SingleLevelMatchesHierarchy)
{
  std::mt19937 rng(8);
  const std::vector<Level> levels = wbc::test::random_hierarchy(rng, 6, {4}, {5});
  const double w = 1.0;
  const HqpSolution a = solve_weighted(levels, std::span<const double>(&w, 1), 6);
  const HqpSolution b = solve_hierarchy(levels, 6);
  EXPECT_LT((a.x - b.x).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Weighted, ConflictingObjectivesAverage)
{
  const std::vector<Level> levels{task(row({1}), vec({0})), task(row({1}), vec({1}))};
  const std::vector<double> w{1.0, 1.0};
  EXPECT_NEAR(solve_weighted(levels, w, 1).x(0), 0.5, 1e-9);
}

TEST(Weighted, LargeWeightApproachesHierarchy)
{
  std::mt19937 rng(9);
  for (int i = 0; i < 20; ++i) {
    const std::vector<Level> levels = wbc::test::random_hierarchy(rng, 4, {3, 3}, {2, 0});
    const std::vector<double> w{1e6, 1.0};
    const HqpSolution weighted = solve_weighted(levels, w, 4);
    const HqpSolution strict = solve_hierarchy(levels, 4);
    EXPECT_NEAR(weighted.per_level[0].residual_sq, strict.per_level[0].residual_sq, 1e-3);
  }
}

TEST(Weighted, RejectsNonPositiveWeights)
{
  const std::vector<Level> levels{task(row({1}), vec({0}))};
  const double w = 0.0;
  EXPECT_THROW(solve_weighted(levels, std::span<const double>(&w, 1), 1), std::invalid_argument);
}
