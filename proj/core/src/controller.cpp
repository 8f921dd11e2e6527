#include "wbc/controller.hpp"

#include <algorithm>
#include <chrono>

#include "yaml_util.hpp"

namespace wbc {

using namespace detail;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TaskGains read_gains(const YAML::Node& gains, const std::string& key, TaskGains fallback)
{
  const YAML::Node n = optional_map(gains, key, "gains");
  if (!n.IsDefined())
    return fallback;
  const std::string path = join("gains", key);
  check_keys(n, path, {"kp", "kd"});
  return {get_double(n, "kp", path, fallback.kp), get_double(n, "kd", path, fallback.kd)};
}

Eigen::VectorXd per_joint(const Eigen::VectorXd& configured, const Eigen::VectorXd& from_model,
                          const char* name)
{
  if (configured.size() == 0)
    return from_model;
  if (configured.size() != from_model.size())
    throw std::invalid_argument(std::string("controller config: '") + name + "' has " +
                                std::to_string(configured.size()) + " entries, model has " +
                                std::to_string(from_model.size()) + " joints");
  return configured;
}

}  // namespace

JointControlParams ControllerConfig::joint_params(const RobotModel& model) const
{
  JointControlParams p = JointControlParams::from_model(model);
  p.k_f = k_f;
  p.k_qdot = k_qdot;
  p.qdot_star = qdot_star;
  p.leak = leak;
  p.k_i = per_joint(k_i, p.k_i, "k_i");
  p.coulomb = per_joint(coulomb, p.coulomb, "coulomb");
  p.viscous = per_joint(viscous, p.viscous, "viscous");
  p.validate();
  return p;
}

ControllerConfig load_controller_config(const std::string& text)
{
  const YAML::Node root = parse_document(text);
  check_keys(root, "", {"gains", "cop_margin", "mu", "safe_region_scale", "zmp_source",
                        "zmp_min_force", "force_weight", "standing_height_offset", "sole", "warm_start",
                        "joint_control"});
  ControllerConfig c;
  HierarchyConfig& h = c.hierarchy;

  const YAML::Node gains = optional_map(root, "gains", "");
  if (gains.IsDefined()) {
    check_keys(gains, "gains", {"foot", "com", "torso"});
    h.foot = read_gains(gains, "foot", h.foot);
    h.com = read_gains(gains, "com", h.com);
    h.torso = read_gains(gains, "torso", h.torso);
  }
  h.cop_margin = get_double(root, "cop_margin", "", h.cop_margin);
  h.mu = get_double(root, "mu", "", h.mu);
  h.safe_region_scale = get_double(root, "safe_region_scale", "", h.safe_region_scale);
  const std::string source = get_string(root, "zmp_source", "", "measured");
  if (source == "measured")
    h.zmp_source = ZmpSource::kMeasured;
  else if (source == "optimized")
    h.zmp_source = ZmpSource::kOptimized;
  else
    fail_at(root["zmp_source"], "zmp_source", "expected 'measured' or 'optimized'");
  h.zmp_min_force = get_double(root, "zmp_min_force", "", h.zmp_min_force);
  h.force_weight = get_double(root, "force_weight", "", h.force_weight);
  if (root["standing_height_offset"].IsDefined() && !root["standing_height_offset"].IsNull())
    h.standing_height_offset = get_double(root, "standing_height_offset", "");
  if (root["sole"].IsDefined() && !root["sole"].IsNull()) {
    const Eigen::VectorXd s = get_vector(root, "sole", "", 4);
    if ((s.array() <= 0.0).any())
      fail_at(root["sole"], "sole", "half-extents must be positive");
    c.sole = Eigen::Vector4d(s);
  }
  c.warm_start = get_bool(root, "warm_start", "", c.warm_start);

  const YAML::Node jc = optional_map(root, "joint_control", "");
  if (jc.IsDefined()) {
    const std::string p = "joint_control";
    check_keys(jc, p, {"k_f", "k_qdot", "qdot_star", "leak", "k_i", "coulomb", "viscous"});
    c.k_f = get_double(jc, "k_f", p, c.k_f);
    c.k_qdot = get_double(jc, "k_qdot", p, c.k_qdot);
    c.qdot_star = get_double(jc, "qdot_star", p, c.qdot_star);
    c.leak = get_double(jc, "leak", p, c.leak);
    c.k_i = get_vector(jc, "k_i", p, -1, Eigen::VectorXd());
    c.coulomb = get_vector(jc, "coulomb", p, -1, Eigen::VectorXd());
    c.viscous = get_vector(jc, "viscous", p, -1, Eigen::VectorXd());
  }

  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0, "");
  }
  if (!(c.qdot_star > 0.0) || c.k_f < 0.0 || c.k_f > 1.0 || c.k_qdot < 0.0 || c.leak <= 0.0 ||
      c.leak > 1.0)
    throw ParseError("joint control parameters out of range", 0, "joint_control");
  return c;
}

ControllerConfig load_controller_config_file(const std::string& path)
{
  return load_controller_config(read_text_file(path));
}

RobotModel with_sole_override(const RobotModel& model, const ControllerConfig& config)
{
  if (!config.sole)
    return model;
  ModelDescription d = model.description();
  for (auto& c : d.contacts) {
    c.lx_minus = (*config.sole)(0);
    c.lx_plus = (*config.sole)(1);
    c.ly_minus = (*config.sole)(2);
    c.ly_plus = (*config.sole)(3);
  }
  return RobotModel(std::move(d));
}

BalanceController::BalanceController(const RobotModel& model, ControllerConfig config)
  : model_(with_sole_override(model, config)), config_(std::move(config))
{
  if (!model_.floating_base())
    throw std::invalid_argument("BalanceController requires a floating-base model");
  config_.hierarchy.validate();
  joint_ = config_.joint_params(model_);
  solver_.set_warm_start(config_.warm_start);
}

void BalanceController::reset(const RobotState& state)
{
  refs_.reset();
  last_contact_.clear();
  last_optimized_zmp_.clear();
  solver_.reset();
  joint_.reset(state.dq);
}

TickOutput BalanceController::tick(const RobotState& state, const std::vector<Vector6d>& wrenches,
                                   double dt)
{
  const std::size_t nc = model_.contacts().size();
  if (wrenches.size() != nc)
    throw std::invalid_argument("tick: expected one measured wrench per contact");
  const HierarchyConfig& hc = config_.hierarchy;
  const auto start = Clock::now();

  TickOutput out;
  out.measured_zmp.resize(nc);
  out.contact.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    out.measured_zmp[i] = measured_zmp(wrenches[i], hc.zmp_min_force);
    out.contact[i] = out.measured_zmp[i].valid;
  }
  if (last_contact_ != out.contact)
    joint_.reset(state.dq);
  last_contact_ = out.contact;

  // Planner.
  auto t0 = Clock::now();
  const std::vector<Zmp>& planner_zmp =
      (hc.zmp_source == ZmpSource::kOptimized && last_optimized_zmp_.size() == nc) ? last_optimized_zmp_
                                                                                 : out.measured_zmp;
  out.refs = plan_references(model_, state, planner_zmp, out.contact, hc, refs_ ? &*refs_ : nullptr);
  refs_ = out.refs;
  out.timing.planner = seconds_since(t0);

  // Hierarchy.
  t0 = Clock::now();
  const std::vector<Level> levels = build_hierarchy(model_, state, out.refs, hc, out.contact);
  out.timing.build = seconds_since(t0);

  t0 = Clock::now();
  HqpSolution hqp = solver_.solve(levels, hierarchy_variables(model_));
  out.timing.solve = seconds_since(t0);
  out.timing.qp = hqp.qp_time;
  out.timing.projection = hqp.projection_time;
  out.degraded = hqp.degraded;
  for (const Level& l : levels)
    if (l.D.rows() > 0)
      out.max_violation = std::max(out.max_violation, (l.D * hqp.x - l.f).maxCoeff());

  // Joint-level law.
  t0 = Clock::now();
  out.solution = make_solution(model_, state, std::move(hqp));
  out.command = joint_command(out.solution.tau_opt, out.solution.qdd_opt.tail(model_.num_joints()),
                              state, joint_, dt);
  out.current = out.command.current;
  out.timing.command = seconds_since(t0);

  const Kinematics kin = forward_kinematics(model_, state);
  out.optimized_zmp.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const Transform sole = frame_pose(model_, kin, model_.contact_frame(static_cast<int>(i)));
    out.optimized_zmp[i] = measured_zmp(to_sole_frame(sole, out.solution.F_opt.segment<6>(6 * i)),
                                        hc.zmp_min_force);
  }
  last_optimized_zmp_ = out.optimized_zmp;
  out.timing.total = seconds_since(start);
  return out;
}

}  // namespace wbc
