#include "wbc/identification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "wbc/document.hpp"
#include "wbc/qp.hpp"
#include "yaml_util.hpp"

namespace wbc {

using namespace detail;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_fixed_base(const RobotModel& model)
{
  if (model.floating_base())
    throw IdentificationError("identification needs a fixed-base model, '" + model.name() +
                              "' has a floating base");
}

RobotState make_state(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& dq)
{
  RobotState s = RobotState::zero(model);
  s.q = q;
  s.dq = dq;
  return s;
}

// Upper bound of |q - q0| and |dq| for each joint.
void amplitude_bounds(const FourierTrajectory& traj, Eigen::VectorXd& position,
                      Eigen::VectorXd& velocity)
{
  const double w = 2.0 * M_PI * traj.f0;
  position = Eigen::VectorXd::Zero(traj.num_joints());
  velocity = Eigen::VectorXd::Zero(traj.num_joints());
  for (int j = 0; j < traj.num_joints(); ++j)
    for (int k = 0; k < traj.harmonics(); ++k) {
      const double r = std::hypot(traj.a(j, k), traj.b(j, k));
      position(j) += r;
      velocity(j) += r * w * (k + 1);
    }
}

bool within_amplitude_bounds(const FourierTrajectory& traj, const ExcitationLimits& limits)
{
  Eigen::VectorXd pos, vel;
  amplitude_bounds(traj, pos, vel);
  for (int j = 0; j < traj.num_joints(); ++j) {
    if (traj.q0(j) - pos(j) < limits.q_min(j) || traj.q0(j) + pos(j) > limits.q_max(j))
      return false;
    if (vel(j) > limits.dq_max(j))
      return false;
  }
  return true;
}

Eigen::MatrixXd joint_rows(const RobotModel& model, const RobotState& s, const Eigen::VectorXd& qdd,
                           double band)
{
  return regressor(model, s, qdd, band).bottomRows(model.num_joints());
}

std::vector<int> friction_columns(const RobotModel& model)
{
  std::vector<int> cols;
  const int offset = 10 * model.num_links();
  for (int c = offset; c < parameter_count(model); ++c)
    cols.push_back(c);
  return cols;
}

void check_limit_sizes(const ExcitationLimits& limits, int n)
{
  if (limits.q_min.size() != n || limits.q_max.size() != n || limits.dq_max.size() != n ||
      limits.tau_max.size() != n)
    throw std::invalid_argument("excitation limits: expected " + std::to_string(n) + " entries each");
}

}  // namespace

FourierTrajectory FourierTrajectory::zero(int joints, int harmonics, double f0)
{
  FourierTrajectory t;
  t.f0 = f0;
  t.q0 = Eigen::VectorXd::Zero(joints);
  t.a = Eigen::MatrixXd::Zero(joints, harmonics);
  t.b = Eigen::MatrixXd::Zero(joints, harmonics);
  return t;
}

void FourierTrajectory::validate() const
{
  if (!(f0 > 0.0))
    throw std::invalid_argument("Fourier trajectory: base frequency must be positive");
  if (a.rows() != q0.size() || b.rows() != q0.size() || a.cols() != b.cols() || a.cols() < 1)
    throw std::invalid_argument("Fourier trajectory: coefficient shapes do not match");
}

TrajectorySample eval_trajectory(const FourierTrajectory& traj, double t)
{
  const int n = traj.num_joints();
  TrajectorySample s{traj.q0, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  const double w = 2.0 * M_PI * traj.f0;
  for (int k = 0; k < traj.harmonics(); ++k) {
    const double wk = w * (k + 1);
    const double sn = std::sin(wk * t);
    const double cs = std::cos(wk * t);
    s.q += traj.a.col(k) * sn + traj.b.col(k) * cs;
    s.dq += wk * (traj.a.col(k) * cs - traj.b.col(k) * sn);
    s.ddq -= wk * wk * (traj.a.col(k) * sn + traj.b.col(k) * cs);
  }
  return s;
}

ExcitationLimits ExcitationLimits::from_model(const RobotModel& model, double margin)
{
  const int n = model.num_joints();
  ExcitationLimits l;
  l.q_min.resize(n);
  l.q_max.resize(n);
  l.dq_max.resize(n);
  l.tau_max.resize(n);
  for (int j = 0; j < n; ++j) {
    const JointParams& p = model.joint(j);
    const double mid = 0.5 * (p.position_min + p.position_max);
    const double half = 0.5 * (p.position_max - p.position_min) * margin;
    l.q_min(j) = mid - half;
    l.q_max(j) = mid + half;
    l.dq_max(j) = p.velocity_limit * margin;
    l.tau_max(j) = std::min(-p.torque_min, p.torque_max) * margin;
  }
  return l;
}

LimitViolation check_limits(const RobotModel& model, const FourierTrajectory& traj,
                            const ExcitationLimits& limits, double rate, bool check_torque)
{
  traj.validate();
  const int n = traj.num_joints();
  check_limit_sizes(limits, n);
  const Eigen::VectorXd pi = parameter_vector(model);
  const int steps = static_cast<int>(std::ceil(traj.period() * rate));
  for (int i = 0; i <= steps; ++i) {
    const double t = i / rate;
    const TrajectorySample s = eval_trajectory(traj, t);
    auto report = [&](int j, const char* what, double value, double bound) {
      return LimitViolation{true, t, j, what, value, bound};
    };
    for (int j = 0; j < n; ++j) {
      if (s.q(j) < limits.q_min(j))
        return report(j, "position", s.q(j), limits.q_min(j));
      if (s.q(j) > limits.q_max(j))
        return report(j, "position", s.q(j), limits.q_max(j));
      if (std::abs(s.dq(j)) > limits.dq_max(j))
        return report(j, "velocity", s.dq(j), limits.dq_max(j));
    }
    if (check_torque) {
      const Eigen::VectorXd tau = rnea(model, make_state(model, s.q, s.dq), s.ddq).tail(n);
      for (int j = 0; j < n; ++j)
        if (std::abs(tau(j)) > limits.tau_max(j))
          return report(j, "torque", tau(j), limits.tau_max(j));
    }
  }
  return {};
}

IdentDataset stack_regressor(const RobotModel& model, const FourierTrajectory& traj,
                             double sample_rate, double duration, const ExcitationLimits& limits,
                             double friction_band)
{
  require_fixed_base(model);
  traj.validate();
  if (traj.num_joints() != model.num_joints())
    throw std::invalid_argument("stack_regressor: trajectory has " +
                                std::to_string(traj.num_joints()) + " joints, model has " +
                                std::to_string(model.num_joints()));
  if (!(sample_rate > 0.0) || !(duration > 0.0))
    throw std::invalid_argument("stack_regressor: sample rate and duration must be positive");
  check_limit_sizes(limits, model.num_joints());

  const LimitViolation v = check_limits(model, traj, limits, 1000.0, false);
  if (v.violated) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "trajectory breaks the %s limit of joint '%s' at t=%.3f s (%g vs %g)",
                  v.quantity.c_str(), model.joint(v.joint).name.c_str(), v.time, v.value, v.bound);
    throw IdentificationError(buf);
  }

  const int count = static_cast<int>(std::floor(duration * sample_rate + 1e-9));
  std::vector<IdentSample> samples;
  samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double t = i / sample_rate;
    TrajectorySample s = eval_trajectory(traj, t);
    samples.push_back({t, std::move(s.q), std::move(s.dq), std::move(s.ddq),
                       Eigen::VectorXd::Zero(model.num_joints())});
  }
  return stack_regressor(model, std::move(samples), sample_rate, friction_band);
}

IdentDataset stack_regressor(const RobotModel& model, std::vector<IdentSample> samples,
                             double sample_rate, double friction_band)
{
  require_fixed_base(model);
  const int n = model.num_joints();
  IdentDataset d;
  d.sample_rate = sample_rate;
  d.samples = std::move(samples);
  const int rows = static_cast<int>(d.samples.size()) * n;
  d.Y.resize(rows, parameter_count(model));
  d.tau.resize(rows);
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const IdentSample& s = d.samples[i];
    if (s.q.size() != n || s.dq.size() != n || s.ddq.size() != n || s.tau.size() != n)
      throw std::invalid_argument("stack_regressor: sample " + std::to_string(i) +
                                  " does not have one entry per joint");
    const int r = static_cast<int>(i) * n;
    d.Y.middleRows(r, n) = joint_rows(model, make_state(model, s.q, s.dq), s.ddq, friction_band);
    d.tau.segment(r, n) = s.tau;
  }
  return d;
}

Eigen::MatrixXd BaseParameters::reduce(const Eigen::MatrixXd& Y) const
{
  Eigen::MatrixXd out(Y.rows(), dimension);
  for (int k = 0; k < dimension; ++k)
    out.col(k) = Y.col(independent[k]);
  return out;
}

Eigen::VectorXd BaseParameters::to_full(const Eigen::VectorXd& base, int full_dimension) const
{
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(full_dimension);
  for (int k = 0; k < dimension; ++k)
    pi(independent[k]) = base(k);
  return pi;
}

BaseParameters base_parameters(const Eigen::MatrixXd& Y, double tol, int expected)
{
  const int p = static_cast<int>(Y.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Y);
  const Eigen::MatrixXd R = qr.matrixR().topRows(std::min<Eigen::Index>(Y.rows(), p))
                                .triangularView<Eigen::Upper>();
  const double sigma_max = R.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()(0) : 0.0;
  int rank = 0;
  while (rank < R.rows() && std::abs(R(rank, rank)) > tol * sigma_max)
    ++rank;
  if (expected >= 0 && rank < expected)
    throw IdentificationError("degenerate regressor: rank " + std::to_string(rank) +
                              " below the expected " + std::to_string(expected));

  const Eigen::VectorXi perm = qr.colsPermutation().indices();
  // Order the kept columns ascending; the mapping follows that order.
  std::vector<int> order(rank);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return perm(x) < perm(y); });

  const Eigen::MatrixXd R11 = R.topLeftCorner(rank, rank);
  const Eigen::MatrixXd R12 = R.topRightCorner(rank, p - rank);
  const Eigen::MatrixXd coupling =
      R11.triangularView<Eigen::Upper>().solve(R12);  // dependent columns in terms of kept ones

  Eigen::MatrixXd pivoted = Eigen::MatrixXd::Zero(rank, p);
  pivoted.leftCols(rank).setIdentity();
  pivoted.rightCols(p - rank) = coupling;

  BaseParameters b;
  b.dimension = rank;
  b.mapping.resize(rank, p);
  for (int k = 0; k < rank; ++k) {
    b.independent.push_back(perm(order[k]));
    for (int c = 0; c < p; ++c)
      b.mapping(k, perm(c)) = pivoted(order[k], c);
  }
  return b;
}

BaseParameters structural_base_parameters(const RobotModel& model, unsigned seed, double friction_band)
{
  require_fixed_base(model);
  const int n = model.num_joints();
  const int p = parameter_count(model);
  const int samples = std::max(20, 4 * p / std::max(n, 1));
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd Y(samples * n, p);
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd q(n), dq(n), ddq(n);
    for (int j = 0; j < n; ++j) {
      const JointParams& jp = model.joint(j);
      q(j) = 0.5 * (jp.position_min + jp.position_max) +
             0.5 * (jp.position_max - jp.position_min) * unit(rng);
      // Stay clear of the friction band so both friction columns are excited.
      dq(j) = (0.5 + 2.0 * std::abs(unit(rng))) * (unit(rng) < 0.0 ? -1.0 : 1.0);
      ddq(j) = 5.0 * unit(rng);
    }
    Y.middleRows(i * n, n) = joint_rows(model, make_state(model, q, dq), ddq, friction_band);
  }
  return base_parameters(Y);
}

double regressor_condition(const Eigen::MatrixXd& Y, const BaseParameters& base)
{
  if (base.dimension == 0)
    return kInf;
  const Eigen::MatrixXd Yb = base.reduce(Y);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Yb);
  const Eigen::MatrixXd R =
      qr.matrixQR().topRows(std::min<Eigen::Index>(Yb.rows(), Yb.cols())).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
  if (sv.size() < base.dimension || !(sv(sv.size() - 1) > 0.0))
    return kInf;
  return sv(0) / sv(sv.size() - 1);
}

FourierTrajectory random_trajectory(const ExcitationLimits& limits, int harmonics, double f0,
                                    unsigned seed)
{
  const int n = static_cast<int>(limits.q_min.size());
  check_limit_sizes(limits, n);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> fill(0.3, 0.95);
  FourierTrajectory t = FourierTrajectory::zero(n, harmonics, f0);
  t.q0 = 0.5 * (limits.q_min + limits.q_max);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < harmonics; ++k) {
      t.a(j, k) = unit(rng);
      t.b(j, k) = unit(rng);
    }
  Eigen::VectorXd pos, vel;
  amplitude_bounds(t, pos, vel);
  for (int j = 0; j < n; ++j) {
    const double half = 0.5 * (limits.q_max(j) - limits.q_min(j));
    const double s = fill(rng) * std::min(half / pos(j), limits.dq_max(j) / vel(j));
    t.a.row(j) *= s;
    t.b.row(j) *= s;
  }
  return t;
}

double excitation_cost(const RobotModel& model, const FourierTrajectory& traj,
                       const BaseParameters& base, const ExcitationLimits& limits, double rate,
                       double friction_band)
{
  if (!within_amplitude_bounds(traj, limits))
    return kInf;
  const int n = model.num_joints();
  const int count = static_cast<int>(std::floor(traj.period() * rate + 1e-9));
  const Eigen::VectorXd pi = parameter_vector(model);
  Eigen::MatrixXd Y(count * n, parameter_count(model));
  for (int i = 0; i < count; ++i) {
    const TrajectorySample s = eval_trajectory(traj, i / rate);
    Y.middleRows(i * n, n) = joint_rows(model, make_state(model, s.q, s.dq), s.ddq, friction_band);
    const Eigen::VectorXd tau = Y.middleRows(i * n, n) * pi;
    if (((tau.array().abs()) > limits.tau_max.array()).any())
      return kInf;
  }
  return regressor_condition(Y, base);
}

ExcitationResult optimize_excitation(const RobotModel& model, const ExcitationLimits& limits,
                                     const ExcitationOptions& options)
{
  require_fixed_base(model);
  const int n = model.num_joints();
  check_limit_sizes(limits, n);
  if (options.harmonics < 1 || options.starts < 1 || options.evaluations_per_start < 1 ||
      !(options.f0 > 0.0) || !(options.cost_rate > 0.0))
    throw std::invalid_argument("optimize_excitation: invalid options");

  const BaseParameters base = structural_base_parameters(model);
  auto cost = [&](const FourierTrajectory& t) {
    return excitation_cost(model, t, base, limits, options.cost_rate);
  };

  ExcitationResult best;
  best.condition = kInf;
  best.initial_condition = kInf;
  std::vector<std::pair<double, FourierTrajectory>> finals;

  for (int start = 0; start < options.starts; ++start) {
    const unsigned seed = options.seed * 7919u + static_cast<unsigned>(start);
    FourierTrajectory x = random_trajectory(limits, options.harmonics, options.f0, seed);
    double fx = cost(x);
    int evals = 1;
    best.initial_condition = std::min(best.initial_condition, fx);

    // Coordinate descent over q0 and every coefficient with a shrinking step.
    const int dims = n * (1 + 2 * options.harmonics);
    Eigen::VectorXd step(n);
    for (int j = 0; j < n; ++j)
      step(j) = 0.1 * (limits.q_max(j) - limits.q_min(j));
    std::mt19937 rng(seed ^ 0x9e3779b9u);
    std::vector<int> order(dims);
    std::iota(order.begin(), order.end(), 0);
    auto coord = [&](FourierTrajectory& t, int d) -> double& {
      const int j = d % n;
      const int k = d / n;
      if (k == 0)
        return t.q0(j);
      return (k - 1) % 2 == 0 ? t.a(j, (k - 1) / 2) : t.b(j, (k - 1) / 2);
    };
    double scale = 1.0;
    while (evals < options.evaluations_per_start && scale > 1e-3) {
      bool improved = false;
      std::shuffle(order.begin(), order.end(), rng);
      for (int d : order) {
        if (evals >= options.evaluations_per_start)
          break;
        const double delta = scale * step(d % n) / (d < n ? 1.0 : 1.0 + (d / n - 1) / 2);
        for (double sign : {1.0, -1.0}) {
          FourierTrajectory y = x;
          coord(y, d) += sign * delta;
          const double fy = cost(y);
          ++evals;
          if (fy < fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved)
        scale *= 0.5;
    }
    best.evaluations += evals;
    finals.emplace_back(fx, std::move(x));
  }

  // Best by cost, ties to the lowest start; the winner must pass the fine check.
  std::vector<int> rank(finals.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(),
                   [&](int x, int y) { return finals[x].first < finals[y].first; });
  for (int r : rank) {
    if (!std::isfinite(finals[r].first))
      break;
    if (!check_limits(model, finals[r].second, limits, 1000.0, true).violated) {
      best.trajectory = finals[r].second;
      best.condition = finals[r].first;
      return best;
    }
  }
  throw IdentificationError("no feasible excitation trajectory found within the budget");
}

Estimate estimate_parameters(const IdentDataset& data, const RobotModel& model,
                             const EstimationOptions& options, const BaseParameters* base)
{
  if (data.Y.rows() == 0 || data.Y.rows() != data.tau.size())
    throw std::invalid_argument("estimate_parameters: empty or inconsistent dataset");
  const int p = parameter_count(model);
  if (data.Y.cols() != p)
    throw std::invalid_argument("estimate_parameters: regressor does not match the model");

  // Columns used by the solve, as indices into pi.
  std::vector<int> cols;
  if (options.mode == EstimationMode::kBase) {
    if (!base)
      throw std::invalid_argument("estimate_parameters: base mode needs base parameters");
    cols = base->independent;
  } else {
    cols.resize(p);
    std::iota(cols.begin(), cols.end(), 0);
  }
  if (!options.friction) {
    const std::vector<int> fc = friction_columns(model);
    std::erase_if(cols, [&](int c) { return std::find(fc.begin(), fc.end(), c) != fc.end(); });
  }

  Eigen::MatrixXd A(data.Y.rows(), static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    A.col(k) = data.Y.col(cols[k]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  Estimate e;
  e.mode = options.mode;
  e.rank = static_cast<int>(qr.rank());
  if (options.mode == EstimationMode::kFull && e.rank < A.cols())
    throw IdentificationError("regressor has rank " + std::to_string(e.rank) + " of " +
                              std::to_string(A.cols()) +
                              " columns; the full parameters are not identifiable, use base mode");
  if (options.mode == EstimationMode::kBase && e.rank < A.cols())
    throw IdentificationError("data do not excite all base parameters (rank " +
                              std::to_string(e.rank) + " of " + std::to_string(A.cols()) + ")");

  Eigen::VectorXd sol = qr.solve(data.tau);
  if (options.mode == EstimationMode::kFull && options.nonnegative_masses) {
    // min |A x - tau|^2 with x_m >= 0, through R of the QR factorization.
    Eigen::HouseholderQR<Eigen::MatrixXd> hqr(A);
    const int m = static_cast<int>(A.cols());
    const Eigen::MatrixXd R = hqr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qtb = (hqr.householderQ().transpose() * data.tau).head(m);
    std::vector<int> mass_cols;
    for (int k = 0; k < m; ++k)
      if (cols[k] < 10 * model.num_links() && cols[k] % 10 == 0)
        mass_cols.push_back(k);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<int>(mass_cols.size()), m);
    for (std::size_t r = 0; r < mass_cols.size(); ++r)
      D(static_cast<int>(r), mass_cols[r]) = -1.0;
    const QpResult qp =
        solve_qp_factored(R, -R.transpose() * qtb, D, Eigen::VectorXd::Zero(D.rows()));
    if (!qp.ok())
      throw IdentificationError(std::string("bounded estimation failed: ") + to_string(qp.status));
    sol = qp.x;
  }

  const int full = options.mode == EstimationMode::kBase ? base->dimension : p;
  e.params = Eigen::VectorXd::Zero(full);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (options.mode == EstimationMode::kBase) {
      const auto it = std::find(base->independent.begin(), base->independent.end(), cols[k]);
      e.params(static_cast<int>(it - base->independent.begin())) = sol(k);
    } else {
      e.params(cols[k]) = sol(k);
    }
  }

  const Eigen::VectorXd residual = A * sol - data.tau;
  const int n = data.num_joints() > 0 ? data.num_joints() : model.num_joints();
  const Eigen::Index N = residual.size() / n;
  const Eigen::Map<const Eigen::MatrixXd> per(residual.data(), n, N);  // joint x sample
  e.rms = (per.array().square().rowwise().sum() / static_cast<double>(N)).sqrt();
  e.mean_abs = per.array().abs().rowwise().sum() / static_cast<double>(N);
  return e;
}

Eigen::VectorXd predict_torque(const RobotModel& model, const Eigen::VectorXd& params,
                               const RobotState& state, const Eigen::VectorXd& qdd,
                               double friction_band)
{
  if (params.size() != parameter_count(model))
    throw std::invalid_argument("predict_torque: parameter vector has the wrong size");
  return regressor(model, state, qdd, friction_band).bottomRows(model.num_joints()) * params;
}

void synthesize_torques(IdentDataset& data, const Eigen::VectorXd& pi_true, double noise_sigma,
                        unsigned seed)
{
  data.tau = data.Y * pi_true;
  std::mt19937 rng(seed);
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Eigen::Index i = 0; i < data.tau.size(); ++i)
      data.tau(i) += noise(rng);
  }
  const int n = data.num_joints();
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    data.samples[i].tau = data.tau.segment(static_cast<Eigen::Index>(i) * n, n);
}

Eigen::MatrixXd lowpass_filter(const Eigen::MatrixXd& signal, double sample_rate, double cutoff)
{
  if (!(cutoff > 0.0) || !(cutoff < 0.5 * sample_rate))
    throw std::invalid_argument("lowpass_filter: cutoff must lie in (0, sample_rate / 2)");
  // Bilinear-transform Butterworth biquad.
  const double k = std::tan(M_PI * cutoff / sample_rate);
  const double norm = 1.0 / (1.0 + M_SQRT2 * k + k * k);
  const double b0 = k * k * norm, b1 = 2.0 * b0, b2 = b0;
  const double a1 = 2.0 * (k * k - 1.0) * norm;
  const double a2 = (1.0 - M_SQRT2 * k + k * k) * norm;

  auto pass = [&](Eigen::VectorXd x) {
    // Start from steady state at the first sample to avoid a transient.
    double x1 = x(0), x2 = x(0), y1 = x(0), y2 = x(0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double xi = x(i);
      const double yi = b0 * xi + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = xi;
      y2 = y1;
      y1 = yi;
      x(i) = yi;
    }
    return x;
  };
  Eigen::MatrixXd out(signal.rows(), signal.cols());
  for (Eigen::Index c = 0; c < signal.cols(); ++c) {
    if (signal.rows() == 0)
      break;
    Eigen::VectorXd f = pass(signal.col(c));
    f.reverseInPlace();
    f = pass(f);
    f.reverseInPlace();
    out.col(c) = f;
  }
  return out;
}

void filter_velocities(IdentDataset& data, const RobotModel& model, double cutoff,
                       double friction_band)
{
  const int n = data.num_joints();
  const Eigen::Index N = static_cast<Eigen::Index>(data.samples.size());
  if (N == 0)
    return;
  Eigen::MatrixXd dq(N, n);
  for (Eigen::Index i = 0; i < N; ++i)
    dq.row(i) = data.samples[i].dq.transpose();
  dq = lowpass_filter(dq, data.sample_rate, cutoff);
  for (Eigen::Index i = 0; i < N; ++i)
    data.samples[i].dq = dq.row(i).transpose();
  data = stack_regressor(model, std::move(data.samples), data.sample_rate, friction_band);
}

void write_dataset_csv(const IdentDataset& data, std::ostream& out)
{
  const int n = data.num_joints();
  out << "t";
  for (const char* prefix : {"q", "dq", "ddq", "tau"})
    for (int j = 1; j <= n; ++j)
      out << ',' << prefix << j;
  out << '\n';
  char buf[32];
  for (const IdentSample& s : data.samples) {
    out << format_double(s.t);
    for (const Eigen::VectorXd* v : {&s.q, &s.dq, &s.ddq, &s.tau})
      for (int j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", (*v)(j));
        out << ',' << buf;
      }
    out << '\n';
  }
}

std::vector<IdentSample> read_dataset_csv(std::istream& in, int joints)
{
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("dataset is empty", 1, "");
  std::map<std::string, int> column;
  {
    std::stringstream ss(line);
    std::string name;
    int c = 0;
    while (std::getline(ss, name, ',')) {
      while (!name.empty() && (name.back() == '\r' || name.back() == ' '))
        name.pop_back();
      column[name] = c++;
    }
  }
  auto index_of = [&](const std::string& name) {
    const auto it = column.find(name);
    if (it == column.end())
      throw ParseError("missing column '" + name + "'", 1, name);
    return it->second;
  };
  const int t_col = index_of("t");
  std::vector<std::vector<int>> cols;
  for (const char* prefix : {"q", "dq", "ddq", "tau"}) {
    std::vector<int> c;
    for (int j = 1; j <= joints; ++j)
      c.push_back(index_of(prefix + std::to_string(j)));
    cols.push_back(std::move(c));
  }

  std::vector<IdentSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r")
      continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + cell + "'", line_no, "");
      }
    }
    if (values.size() != column.size())
      throw ParseError("expected " + std::to_string(column.size()) + " values, found " +
                           std::to_string(values.size()),
                       line_no, "");
    IdentSample s;
    s.t = values[t_col];
    Eigen::VectorXd* fields[] = {&s.q, &s.dq, &s.ddq, &s.tau};
    for (int f = 0; f < 4; ++f) {
      fields[f]->resize(joints);
      for (int j = 0; j < joints; ++j)
        (*fields[f])(j) = values[cols[f][j]];
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string trajectory_to_yaml(const FourierTrajectory& traj)
{
  traj.validate();
  std::ostringstream out;
  out << "f0: " << format_double(traj.f0) << '\n';
  out << "harmonics: " << traj.harmonics() << '\n';
  out << "joints:\n";
  for (int j = 0; j < traj.num_joints(); ++j) {
    out << "  - q0: " << format_double(traj.q0(j)) << '\n';
    out << "    a: " << vector_text(traj.a.row(j).transpose()) << '\n';
    out << "    b: " << vector_text(traj.b.row(j).transpose()) << '\n';
  }
  return out.str();
}

FourierTrajectory load_trajectory(const std::string& text)
{
  const YAML::Node root = parse_document(text);
  check_keys(root, "", {"f0", "harmonics", "joints"});
  const double f0 = get_double(root, "f0", "", 0.1);
  const int harmonics = root["harmonics"].IsDefined() ? as_int(root["harmonics"], "harmonics") : 5;
  if (!(f0 > 0.0))
    fail_at(root["f0"], "f0", "must be positive");
  if (harmonics < 1)
    fail_at(root["harmonics"], "harmonics", "must be at least 1");
  const YAML::Node joints = require(root, "joints", "");
  if (!joints.IsSequence() || joints.size() == 0)
    fail_at(joints, "joints", "expected a non-empty list");
  FourierTrajectory t = FourierTrajectory::zero(static_cast<int>(joints.size()), harmonics, f0);
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const std::string path = index_path("joints", j);
    check_keys(joints[j], path, {"q0", "a", "b"});
    t.q0(static_cast<int>(j)) = get_double(joints[j], "q0", path, 0.0);
    t.a.row(static_cast<int>(j)) = get_vector(joints[j], "a", path, harmonics).transpose();
    t.b.row(static_cast<int>(j)) = get_vector(joints[j], "b", path, harmonics).transpose();
  }
  return t;
}

double relative_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth)
{
  if (estimate.size() != truth.size())
    throw std::invalid_argument("relative_error: size mismatch");
  const double n = truth.norm();
  return n > 0.0 ? (estimate - truth).norm() / n : (estimate - truth).norm();
}

}  // namespace wbc
