#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wbc/dynamics.hpp"
#include "wbc/model.hpp"

namespace wbc {

class IdentificationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Per joint
///   q(t) = q0 + sum_k a_k sin(2 pi k f0 t) + b_k cos(2 pi k f0 t),  k = 1..harmonics
/// Rows of `a` and `b` are joints, columns harmonics (rad).
struct FourierTrajectory
{
  double f0 = 0.1;  // Hz
  Eigen::VectorXd q0;
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;

  static FourierTrajectory zero(int joints, int harmonics = 5, double f0 = 0.1);

  int num_joints() const { return static_cast<int>(q0.size()); }
  int harmonics() const { return static_cast<int>(a.cols()); }
  double period() const { return 1.0 / f0; }
  void validate() const;
};

struct TrajectorySample
{
  Eigen::VectorXd q;
  Eigen::VectorXd dq;
  Eigen::VectorXd ddq;
};

TrajectorySample eval_trajectory(const FourierTrajectory& traj, double t);

/// Bounds the excitation must respect.
struct ExcitationLimits
{
  Eigen::VectorXd q_min;
  Eigen::VectorXd q_max;
  Eigen::VectorXd dq_max;
  Eigen::VectorXd tau_max;

  /// Model limits shrunk by `margin` (position range about its middle,
  /// velocity and torque bounds scaled).
  static ExcitationLimits from_model(const RobotModel& model, double margin = 0.9);
};

struct LimitViolation
{
  bool violated = false;
  double time = 0.0;
  int joint = -1;
  std::string quantity;  // position | velocity | torque
  double value = 0.0;
  double bound = 0.0;
};

/// Checks the trajectory on a grid of `rate` Hz over one period. Torque is
/// checked against the model's own parameters when `check_torque` is set.
LimitViolation check_limits(const RobotModel& model, const FourierTrajectory& traj,
                            const ExcitationLimits& limits, double rate = 1000.0,
                            bool check_torque = true);

struct IdentSample
{
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd dq;
  Eigen::VectorXd ddq;
  Eigen::VectorXd tau;  // measured joint torque
};

struct IdentDataset
{
  double sample_rate = 0.0;  // Hz
  std::vector<IdentSample> samples;
  Eigen::MatrixXd Y;    // (N n) x dim(pi), sample-major
  Eigen::VectorXd tau;  // N n

  int num_joints() const { return samples.empty() ? 0 : static_cast<int>(samples.front().q.size()); }
};

/// Samples the trajectory at `sample_rate` over [0, duration) and stacks the
/// regressor. Torques are left at zero. Throws IdentificationError naming the
/// time and joint of the first limit violation.
IdentDataset stack_regressor(const RobotModel& model, const FourierTrajectory& traj,
                             double sample_rate, double duration, const ExcitationLimits& limits,
                             double friction_band = kDefaultFrictionBand);

/// Stacks the regressor of recorded samples (torques taken from the samples).
IdentDataset stack_regressor(const RobotModel& model, std::vector<IdentSample> samples,
                             double sample_rate, double friction_band = kDefaultFrictionBand);

/// Identifiable combinations pi_base = mapping * pi, with Y * pi equal to
/// Y.col(independent) * pi_base.
struct BaseParameters
{
  Eigen::MatrixXd mapping;       // dimension x dim(pi)
  std::vector<int> independent;  // regressor columns kept, ascending
  int dimension = 0;

  Eigen::MatrixXd reduce(const Eigen::MatrixXd& Y) const;
  Eigen::VectorXd project(const Eigen::VectorXd& pi) const { return mapping * pi; }
  /// A full parameter vector with the same regressor image as `base`.
  Eigen::VectorXd to_full(const Eigen::VectorXd& base, int full_dimension) const;
};

/// Column-pivoted QR of Y. The rank counts diagonal entries of R above
/// tol * sigma_max(Y). Throws when the rank is below `expected` (if >= 0).
BaseParameters base_parameters(const Eigen::MatrixXd& Y, double tol = 1e-9, int expected = -1);

/// Base parameters of the model from the regressor at random states.
BaseParameters structural_base_parameters(const RobotModel& model, unsigned seed = 7,
                                          double friction_band = kDefaultFrictionBand);

/// 2-norm condition number of Y.col(independent).
double regressor_condition(const Eigen::MatrixXd& Y, const BaseParameters& base);

struct ExcitationOptions
{
  int harmonics = 5;
  double f0 = 0.1;
  int starts = 8;
  int evaluations_per_start = 600;
  double cost_rate = 10.0;  // Hz, grid of the condition number
  unsigned seed = 1;
};

struct ExcitationResult
{
  FourierTrajectory trajectory;
  double condition = 0.0;
  double initial_condition = 0.0;  // best of the starting points
  int evaluations = 0;
};

/// Random trajectory within the conservative amplitude bounds of `limits`.
FourierTrajectory random_trajectory(const ExcitationLimits& limits, int harmonics, double f0,
                                    unsigned seed);

/// Condition number of the base regressor along the trajectory, infinity when
/// it breaks a limit on the cost grid.
double excitation_cost(const RobotModel& model, const FourierTrajectory& traj,
                       const BaseParameters& base, const ExcitationLimits& limits, double rate,
                       double friction_band = kDefaultFrictionBand);

/// Multi-start coordinate descent on the condition number. Candidates are
/// kept inside the limits by amplitude bounds, and the result is checked on a
/// 1 kHz grid. Deterministic for a given seed.
ExcitationResult optimize_excitation(const RobotModel& model, const ExcitationLimits& limits,
                                     const ExcitationOptions& options = {});

enum class EstimationMode
{
  kFull,
  kBase,
};

struct Estimate
{
  EstimationMode mode = EstimationMode::kBase;
  Eigen::VectorXd params;          // full pi, or pi_base in base mode
  Eigen::VectorXd rms;             // per joint torque residual
  Eigen::VectorXd mean_abs;        // per joint
  int rank = 0;
};

struct EstimationOptions
{
  EstimationMode mode = EstimationMode::kBase;
  bool nonnegative_masses = false;  // full mode only
  bool friction = true;             // false drops the friction columns
};

/// Least squares min |Y pi - tau|. Base mode needs `base`; full mode throws
/// when Y is rank deficient.
Estimate estimate_parameters(const IdentDataset& data, const RobotModel& model,
                             const EstimationOptions& options = {},
                             const BaseParameters* base = nullptr);

/// Y(state, qdd) * pi for a full parameter vector.
Eigen::VectorXd predict_torque(const RobotModel& model, const Eigen::VectorXd& params,
                               const RobotState& state, const Eigen::VectorXd& qdd,
                               double friction_band = kDefaultFrictionBand);

/// Torque samples Y * pi_true + N(0, sigma) for the dataset's rows.
void synthesize_torques(IdentDataset& data, const Eigen::VectorXd& pi_true, double noise_sigma,
                        unsigned seed);

/// Zero-phase second-order Butterworth low-pass applied forward and backward
/// to each column.
Eigen::MatrixXd lowpass_filter(const Eigen::MatrixXd& signal, double sample_rate, double cutoff);

/// Replaces the dataset velocities with their low-pass filtered versions and
/// restacks the regressor.
void filter_velocities(IdentDataset& data, const RobotModel& model, double cutoff = 20.0,
                       double friction_band = kDefaultFrictionBand);

/// Columns: t, q1..qn, dq1..dqn, ddq1..ddqn, tau1..taun.
void write_dataset_csv(const IdentDataset& data, std::ostream& out);
/// Throws ParseError naming a missing column.
std::vector<IdentSample> read_dataset_csv(std::istream& in, int joints);

std::string trajectory_to_yaml(const FourierTrajectory& traj);
FourierTrajectory load_trajectory(const std::string& text);

/// |est - truth| / |truth|.
double relative_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

}  // namespace wbc
