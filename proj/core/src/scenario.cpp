#include "wbc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numeric>
#include <ostream>

#include "wbc/model_io.hpp"
#include "wbc/robots.hpp"
#include "yaml_util.hpp"

namespace wbc {

using namespace detail;

namespace {

constexpr double kDeg = M_PI / 180.0;

std::string resolve(const std::string& base_dir, const std::string& path)
{
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute())
    return path;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

Impulse make_impulse(double time, const Eigen::Vector3d& impulse, double duration = 0.1)
{
  Impulse i;
  i.start = time;
  i.duration = duration;
  i.force = impulse / duration;
  i.point = Eigen::Vector3d(0.0, 0.0, 0.3);
  return i;
}

SupportProfile read_support(const YAML::Node& n, const std::string& path)
{
  check_keys(n, path, {"type", "origin", "keyframes", "axis", "amplitude", "omega", "phase", "start",
                       "ramp"});
  SupportProfile s;
  const std::string type = get_string(n, "type", path, "flat");
  s.origin = get_vector(n, "origin", path, 3, Eigen::VectorXd(Eigen::Vector3d::Zero()));
  if (type == "flat") {
    s.kind = SupportProfile::Kind::kFlat;
  } else if (type == "none") {
    s.kind = SupportProfile::Kind::kNone;
  } else if (type == "tilt") {
    s.kind = SupportProfile::Kind::kTilt;
    const YAML::Node kf = require(n, "keyframes", path);
    const std::string kp = join(path, "keyframes");
    if (!kf.IsSequence() || kf.size() == 0)
      fail_at(kf, kp, "expected a non-empty list of keyframes");
    for (std::size_t i = 0; i < kf.size(); ++i) {
      const std::string ip = index_path(kp, i);
      check_keys(kf[i], ip, {"time", "roll", "pitch"});
      TiltKeyframe k;
      k.time = get_double(kf[i], "time", ip);
      k.roll = get_double(kf[i], "roll", ip, 0.0) * kDeg;
      k.pitch = get_double(kf[i], "pitch", ip, 0.0) * kDeg;
      if (!s.keyframes.empty() && k.time <= s.keyframes.back().time)
        fail_at(kf[i], ip, "keyframe times must increase");
      s.keyframes.push_back(k);
    }
  } else if (type == "translate") {
    s.kind = SupportProfile::Kind::kTranslate;
    const Eigen::Vector3d axis = get_vector(n, "axis", path, 3, Eigen::VectorXd(Eigen::Vector3d::UnitX()));
    if (axis.norm() < 1e-12)
      fail_at(n["axis"], join(path, "axis"), "axis must be nonzero");
    s.axis = axis.normalized();
    s.amplitude = get_double(n, "amplitude", path);
    s.omega = get_double(n, "omega", path);
    s.phase = get_double(n, "phase", path, 0.0);
    s.start = get_double(n, "start", path, 0.0);
    s.ramp = get_double(n, "ramp", path, 0.0);
    if (s.ramp < 0.0)
      fail_at(n["ramp"], join(path, "ramp"), "ramp must be non-negative");
  } else {
    fail_at(n["type"], join(path, "type"), "expected flat, none, tilt or translate, got '" + type + "'");
  }
  return s;
}

Impulse read_impulse(const YAML::Node& n, const std::string& path)
{
  check_keys(n, path, {"time", "duration", "impulse", "force", "link", "point"});
  Impulse i;
  i.start = get_double(n, "time", path);
  i.duration = get_double(n, "duration", path, 0.1);
  if (!(i.duration > 0.0))
    fail_at(n["duration"], join(path, "duration"), "duration must be positive");
  const bool has_impulse = n["impulse"].IsDefined(), has_force = n["force"].IsDefined();
  if (has_impulse == has_force)
    fail_at(n, path, "give exactly one of 'impulse' (N*s) or 'force' (N)");
  if (has_impulse)
    i.force = get_vector(n, "impulse", path, 3) / i.duration;
  else
    i.force = get_vector(n, "force", path, 3);
  i.link = get_string(n, "link", path, "");
  i.point = get_vector(n, "point", path, 3, Eigen::VectorXd(Eigen::Vector3d(0.0, 0.0, 0.3)));
  return i;
}

// Height of the support plane below a world point.
double support_height(const SupportPose& s, const Eigen::Vector3d& x)
{
  const Eigen::Vector3d n = s.pose.R.col(2);
  return s.pose.p.z() - (n.x() * (x.x() - s.pose.p.x()) + n.y() * (x.y() - s.pose.p.y())) / n.z();
}

bool has_joints(const RobotModel& model, std::initializer_list<const char*> names)
{
  for (const char* name : names) {
    const auto& joints = model.description().joints;
    if (std::none_of(joints.begin(), joints.end(), [&](const JointParams& j) { return j.name == name; }))
      return false;
  }
  return true;
}

double percentile(std::vector<double> v, double p)
{
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()))) - 1;
  return v[std::min(k, v.size() - 1)];
}

}  // namespace

std::string to_string(ScenarioType type)
{
  switch (type) {
    case ScenarioType::kFlatPush:
      return "flat_push";
    case ScenarioType::kSeesaw:
      return "seesaw";
    case ScenarioType::kMovingSupport:
      return "moving_support";
    case ScenarioType::kCustom:
      return "custom";
  }
  return "custom";
}

ScenarioType scenario_type_from_string(const std::string& name)
{
  for (ScenarioType t : {ScenarioType::kFlatPush, ScenarioType::kSeesaw, ScenarioType::kMovingSupport,
                         ScenarioType::kCustom})
    if (to_string(t) == name)
      return t;
  throw std::invalid_argument("unknown scenario type '" + name + "'");
}

void ScenarioConfig::validate() const
{
  if (!(horizon > 0.0))
    throw std::invalid_argument("scenario horizon must be positive");
  if (!(dt > 0.0) || dt > 1e-3 + 1e-12)
    throw std::invalid_argument("scenario dt must lie in (0, 1 ms]");
  if (!(com_height_fraction > 0.0) || com_height_fraction >= 1.0)
    throw std::invalid_argument("com_height_fraction must lie in (0, 1)");
  if (initial_drop < 0.0)
    throw std::invalid_argument("initial_drop must be non-negative");
  for (const Impulse& i : impulses)
    if (!(i.duration > 0.0))
      throw std::invalid_argument("impulse duration must be positive");
}

ControllerConfig scenario_controller_config()
{
  ControllerConfig c;
  HierarchyConfig& h = c.hierarchy;
  h.foot = {64.0, 16.0};
  h.com = {25.0, 10.0};
  h.torso = {100.0, 20.0};
  h.force_weight = 0.1;
  return c;
}

ScenarioConfig default_scenario(ScenarioType type)
{
  ScenarioConfig c;
  c.type = type;
  c.controller = scenario_controller_config();
  c.name = to_string(type);
  switch (type) {
    case ScenarioType::kFlatPush: {
      c.horizon = 13.0;
      const double magnitudes[] = {8.0, 10.0, 11.0, 12.0};
      for (int k = 0; k < 4; ++k)
        c.impulses.push_back(make_impulse(1.0 + 3.0 * k, Eigen::Vector3d(magnitudes[k], 0.0, 0.0)));
      break;
    }
    case ScenarioType::kSeesaw: {
      c.horizon = 14.0;
      SupportProfile s;
      s.kind = SupportProfile::Kind::kTilt;
      const double a = 6.0 * kDeg;
      s.keyframes = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {3.0, a, 0.0},  {4.5, a, 0.0},   {6.5, 0.0, 0.0},
                     {7.0, 0.0, 0.0}, {9.0, 0.0, a},   {10.5, 0.0, a}, {12.5, 0.0, 0.0}};
      c.supports = {s, s};
      break;
    }
    case ScenarioType::kMovingSupport: {
      c.horizon = 12.0;
      SupportProfile s;
      s.kind = SupportProfile::Kind::kTranslate;
      s.axis = Eigen::Vector3d::UnitX();
      s.amplitude = 0.2;
      s.omega = 2.5;
      s.start = 1.0;
      s.ramp = 2.0;
      SupportProfile r = s;
      r.phase = M_PI;
      c.supports = {s, r};
      c.impulses.push_back(make_impulse(6.0, Eigen::Vector3d(0.0, 8.0, 0.0)));
      break;
    }
    case ScenarioType::kCustom:
      break;
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& text, const std::string& base_dir)
{
  const YAML::Node root = parse_document(text);
  check_keys(root, "", {"scenario", "name", "horizon", "dt", "seed", "model", "controller", "sim",
                        "impulses", "supports", "verdict"});
  const std::string type_name = get_string(root, "scenario", "");
  ScenarioConfig c;
  try {
    c = default_scenario(scenario_type_from_string(type_name));
  } catch (const std::invalid_argument& e) {
    fail_at(root["scenario"], "scenario", e.what());
  }
  c.name = get_string(root, "name", "", c.name);
  c.horizon = get_double(root, "horizon", "", c.horizon);
  c.dt = get_double(root, "dt", "", c.dt);
  c.seed = static_cast<unsigned>(root["seed"].IsDefined() ? as_int(root["seed"], "seed") : 1);
  c.sim.seed = c.seed;
  if (root["model"].IsDefined() && !root["model"].IsNull())
    c.model_path = resolve(base_dir, get_string(root, "model", ""));

  const YAML::Node ctl = root["controller"];
  if (ctl.IsDefined() && !ctl.IsNull()) {
    if (ctl.IsScalar()) {
      c.controller = load_controller_config_file(resolve(base_dir, ctl.Scalar()));
    } else if (ctl.IsMap()) {
      YAML::Emitter em;
      em << ctl;
      c.controller = load_controller_config(em.c_str());
    } else {
      fail_at(ctl, "controller", "expected a file path or a mapping");
    }
  }

  const YAML::Node sim = optional_map(root, "sim", "");
  if (sim.IsDefined()) {
    check_keys(sim, "sim", {"normal_stiffness", "normal_damping", "tangential_stiffness",
                            "tangential_damping", "joint_friction", "friction_mismatch",
                            "velocity_noise", "initial_drop"});
    SimParams& p = c.sim;
    p.normal_stiffness = get_double(sim, "normal_stiffness", "sim", p.normal_stiffness);
    p.normal_damping = get_double(sim, "normal_damping", "sim", p.normal_damping);
    p.tangential_stiffness = get_double(sim, "tangential_stiffness", "sim", p.tangential_stiffness);
    p.tangential_damping = get_double(sim, "tangential_damping", "sim", p.tangential_damping);
    p.joint_friction = get_bool(sim, "joint_friction", "sim", p.joint_friction);
    p.friction_mismatch = get_double(sim, "friction_mismatch", "sim", p.friction_mismatch);
    p.velocity_noise = get_double(sim, "velocity_noise", "sim", p.velocity_noise);
    c.initial_drop = get_double(sim, "initial_drop", "sim", c.initial_drop);
    if (!(p.normal_stiffness > 0.0) || !(p.tangential_stiffness > 0.0) || p.normal_damping < 0.0 ||
        p.tangential_damping < 0.0 || p.velocity_noise < 0.0)
      fail_at(sim, "sim", "contact parameters must be positive");
  }

  const YAML::Node imp = root["impulses"];
  if (imp.IsDefined() && !imp.IsNull()) {
    if (!imp.IsSequence())
      fail_at(imp, "impulses", "expected a list");
    c.impulses.clear();
    for (std::size_t i = 0; i < imp.size(); ++i)
      c.impulses.push_back(read_impulse(imp[i], index_path("impulses", i)));
  }
  const YAML::Node sup = root["supports"];
  if (sup.IsDefined() && !sup.IsNull()) {
    if (!sup.IsSequence())
      fail_at(sup, "supports", "expected a list");
    c.supports.clear();
    for (std::size_t i = 0; i < sup.size(); ++i)
      c.supports.push_back(read_support(sup[i], index_path("supports", i)));
  }
  const YAML::Node verdict = optional_map(root, "verdict", "");
  if (verdict.IsDefined()) {
    check_keys(verdict, "verdict", {"com_height_fraction"});
    c.com_height_fraction = get_double(verdict, "com_height_fraction", "verdict", c.com_height_fraction);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0, "");
  }
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path)
{
  return load_scenario(read_text_file(path), std::filesystem::path(path).parent_path().string());
}

RobotModel scenario_model(const ScenarioConfig& config)
{
  if (config.model_path.empty())
    return build_walker3_like();
  return load_model_file(config.model_path);
}

RobotState scenario_initial_state(const ScenarioConfig& config, const RobotModel& model)
{
  RobotState s = RobotState::zero(model);
  if (has_joints(model, {"l_hip_pitch", "l_knee", "l_ankle_pitch", "r_hip_pitch", "r_knee",
                         "r_ankle_pitch"}))
    s = walker3_nominal_state(model);
  if (!model.floating_base() || model.contacts().empty())
    return s;
  const Kinematics kin = forward_kinematics(model, s);
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(model.contacts().size()); ++i)
    lowest = std::min(lowest, frame_pose(model, kin, model.contact_frame(i)).p.z());
  const double corners = 4.0 * static_cast<double>(model.contacts().size());
  const double sink = model.total_mass() * model.gravity().norm() / (corners * config.sim.normal_stiffness);
  s.base_position.z() += -lowest - sink + config.initial_drop;
  return s;
}

ScenarioResult run_scenario(const ScenarioConfig& config)
{
  return run_scenario(config, scenario_model(config));
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RobotModel& model)
{
  config.validate();
  const std::size_t nc = model.contacts().size();
  if (!config.supports.empty() && config.supports.size() != nc)
    throw std::invalid_argument("scenario lists " + std::to_string(config.supports.size()) +
                                " supports, model has " + std::to_string(nc) + " contacts");
  for (const Impulse& i : config.impulses)
    if (!i.link.empty())
      model.link_index(i.link);

  const RobotState initial = scenario_initial_state(config, model);
  World world(model, initial, config.sim, config.supports);
  for (const Impulse& i : config.impulses)
    world.add_impulse(i);
  BalanceController controller(model, config.controller);
  controller.reset(initial);
  const RobotModel& cmodel = controller.model();

  auto mean_support_height = [&](const Kinematics& kin) {
    double sum = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const Eigen::Vector3d p = frame_pose(model, kin, model.contact_frame(static_cast<int>(i))).p;
      sum += support_height(world.support_pose(static_cast<int>(i)), p);
    }
    return nc ? sum / static_cast<double>(nc) : 0.0;
  };
  const double nominal_height =
      center_of_mass(model, initial).position.z() - mean_support_height(forward_kinematics(model, initial));

  ScenarioResult result;
  result.name = config.name;
  result.verdict = "balanced";
  const int steps = static_cast<int>(std::llround(config.horizon / config.dt));
  result.records.reserve(static_cast<std::size_t>(steps));
  Eigen::VectorXd current = Eigen::VectorXd::Zero(model.num_joints());
  double fallen_at = -1.0;

  for (int k = 0; k < steps; ++k) {
    std::vector<Vector6d> wrenches(nc);
    std::vector<ContactWrench> truth(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      truth[i] = world.contact_wrench(static_cast<int>(i));
      wrenches[i] = truth[i].wrench;
    }
    const RobotState measured = world.measured_state();

    TickRecord rec;
    rec.time = world.time();
    rec.state = world.state();
    TickOutput out;
    bool solved = true;
    try {
      out = controller.tick(measured, wrenches, config.dt);
      current = out.current;
    } catch (const HqpError& e) {
      // Keep the previous command; the tick counts as degraded.
      solved = false;
      if (result.message.empty())
        result.message = std::string("t=") + format_double(rec.time) + ": " + e.what();
    }

    const Kinematics kin = forward_kinematics(model, rec.state);
    const ComState com = center_of_mass(model, rec.state);
    rec.com = com.position;
    rec.com_height = com.position.z() - mean_support_height(kin);
    rec.current = current;
    rec.feet.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      FootLog& f = rec.feet[i];
      const int foot = static_cast<int>(i);
      f.corners = truth[i].corners_in_contact;
      f.wrench = wrenches[i];
      const Transform sole = frame_pose(model, kin, model.contact_frame(foot));
      const Eigen::Vector3d normal = world.support_pose(foot).pose.R.col(2);
      f.surface_misalignment = std::acos(std::clamp(sole.R.col(2).dot(normal), -1.0, 1.0));
      if (!solved)
        continue;
      f.contact = out.contact[i];
      f.measured_zmp = out.measured_zmp[i];
      f.optimized_zmp = out.optimized_zmp[i];
      f.zmp_inside = !f.measured_zmp.valid ||
                     inside_sole(cmodel.contacts()[i], f.measured_zmp.position, 1.0, 1e-9);
      f.force_opt = out.solution.F_opt.segment<6>(6 * static_cast<Eigen::Index>(i));
      const FootReference& ref = out.refs.foot[i];
      f.position_error = (ref.pose.p - sole.p).norm();
      f.orientation_error = log_so3(ref.pose.R * sole.R.transpose()).norm();
    }
    if (solved) {
      rec.com_ref = out.refs.com_position;
      for (const LevelDiagnostics& d : out.solution.diagnostics.per_level)
        rec.residual.push_back(std::sqrt(std::max(d.residual_sq, 0.0)));
      rec.tau_opt = out.solution.tau_opt;
      rec.timing = out.timing;
      rec.degraded = out.degraded;
      rec.max_violation = out.max_violation;
    } else {
      rec.degraded = true;
      rec.tau_opt = Eigen::VectorXd::Zero(model.num_joints());
    }

    std::string breach;
    for (int j = 0; j < model.num_joints() && breach.empty(); ++j) {
      const JointParams& jp = model.joint(j);
      if (rec.state.q(j) < jp.position_min || rec.state.q(j) > jp.position_max)
        breach = jp.name;
    }
    result.records.push_back(std::move(rec));

    const bool down = result.records.back().com_height < config.com_height_fraction * nominal_height;
    if ((down || !breach.empty()) && fallen_at < 0.0) {
      fallen_at = world.time();
      result.verdict = "fallen";
      char buf[64];
      std::snprintf(buf, sizeof(buf), " at t=%.3f s", fallen_at);
      result.message = (down ? std::string("CoM height below threshold") : "joint limit breach (" + breach + ")") + buf;
    }
    // Keep logging briefly after a fall, then stop.
    if (fallen_at >= 0.0 && world.time() - fallen_at > 0.5)
      break;

    try {
      world.step(current, config.dt);
    } catch (const SimulationError& e) {
      result.verdict = "diverged";
      result.message = e.what();
      break;
    }
  }
  result.duration = world.time();
  result.stats = compute_stats(result.records, model, config.dt, nominal_height);
  return result;
}

ScenarioStats compute_stats(const std::vector<TickRecord>& records, const RobotModel& model, double dt,
                            double nominal_height)
{
  ScenarioStats s;
  s.ticks = static_cast<int>(records.size());
  if (records.empty())
    return s;
  std::vector<double> ticks;
  ticks.reserve(records.size());
  int four_corner = 0, timed = 0;
  int outside_run = 0, outside_max = 0;
  double steady_p = 0.0, steady_o = 0.0;
  int steady_n = 0;
  const double t_end = records.back().time;
  for (const TickRecord& r : records) {
    if (s.residual_max.size() < r.residual.size()) {
      s.residual_max.resize(r.residual.size(), 0.0);
      s.residual_mean.resize(r.residual.size(), 0.0);
    }
    for (std::size_t l = 0; l < r.residual.size(); ++l) {
      s.residual_max[l] = std::max(s.residual_max[l], r.residual[l]);
      s.residual_mean[l] += r.residual[l];
    }
    if (!r.residual.empty()) {
      ticks.push_back(r.timing.total);
      s.qp_mean += r.timing.qp;
      s.projection_mean += r.timing.projection;
      ++timed;
    }
    if (r.degraded)
      ++s.degraded_ticks;
    if (r.degraded || r.max_violation > 1e-8)
      ++s.violations;
    bool all_four = true, outside = false;
    for (const FootLog& f : r.feet) {
      all_four = all_four && f.corners == 4;
      outside = outside || !f.zmp_inside;
      s.max_surface_misalignment = std::max(s.max_surface_misalignment, f.corners == 4 ? f.surface_misalignment : 0.0);
      if (r.time >= t_end - 1.0 && f.contact) {
        steady_p += f.position_error;
        steady_o += f.orientation_error;
        ++steady_n;
      }
    }
    four_corner += all_four;
    outside_run = outside ? outside_run + 1 : 0;
    outside_max = std::max(outside_max, outside_run);
    s.min_com_height_fraction = std::min(s.min_com_height_fraction, r.com_height / nominal_height);
    for (int j = 0; j < model.num_joints(); ++j) {
      const JointParams& jp = model.joint(j);
      s.joint_limit_breach = s.joint_limit_breach || r.state.q(j) < jp.position_min || r.state.q(j) > jp.position_max;
    }
  }
  for (double& m : s.residual_mean)
    m /= static_cast<double>(timed ? timed : 1);
  if (timed) {
    s.tick_mean = std::accumulate(ticks.begin(), ticks.end(), 0.0) / timed;
    s.tick_max = *std::max_element(ticks.begin(), ticks.end());
    s.tick_p99 = percentile(ticks, 0.99);
    s.qp_mean /= timed;
    s.projection_mean /= timed;
  }
  s.four_corner_fraction = static_cast<double>(four_corner) / static_cast<double>(records.size());
  s.max_zmp_excursion = outside_max * dt;
  if (steady_n) {
    s.steady_foot_position_error = steady_p / steady_n;
    s.steady_foot_orientation_error = steady_o / steady_n;
  }
  return s;
}

void write_log_csv(const ScenarioResult& result, const RobotModel& model, std::ostream& out)
{
  const int n = model.num_joints();
  const std::size_t nc = model.contacts().size();
  std::size_t levels = 0;
  for (const TickRecord& r : result.records)
    levels = std::max(levels, r.residual.size());

  out << "time,base_x,base_y,base_z,base_qw,base_qx,base_qy,base_qz";
  for (const char* prefix : {"q_", "dq_"})
    for (int j = 0; j < n; ++j)
      out << ',' << prefix << model.joint(j).name;
  out << ",com_x,com_y,com_z,com_ref_x,com_ref_y,com_ref_z,com_height";
  for (std::size_t l = 0; l < levels; ++l)
    out << ",residual_" << l + 1;
  for (const char* prefix : {"tau_opt_", "current_"})
    for (int j = 0; j < n; ++j)
      out << ',' << prefix << model.joint(j).name;
  for (std::size_t i = 0; i < nc; ++i) {
    const std::string c = model.contacts()[i].name;
    for (const char* a : {"mx", "my", "mz", "fx", "fy", "fz"})
      out << ",F_opt_" << c << '_' << a;
    for (const char* a : {"mx", "my", "mz", "fx", "fy", "fz"})
      out << ",wrench_" << c << '_' << a;
    out << ",zmp_meas_" << c << "_x,zmp_meas_" << c << "_y,zmp_meas_" << c << "_valid";
    out << ",zmp_opt_" << c << "_x,zmp_opt_" << c << "_y,zmp_opt_" << c << "_valid";
    out << ",contact_" << c << ",corners_" << c << ",foot_pos_err_" << c << ",foot_rot_err_" << c;
  }
  out << ",degraded,max_violation,tick_ms,qp_ms,projection_ms\n";

  auto put = [&out](double v) { out << ',' << format_double(v); };
  for (const TickRecord& r : result.records) {
    out << format_double(r.time);
    const RobotState& s = r.state;
    for (int a = 0; a < 3; ++a)
      put(s.base_position(a));
    put(s.base_orientation.w());
    put(s.base_orientation.x());
    put(s.base_orientation.y());
    put(s.base_orientation.z());
    for (int j = 0; j < n; ++j)
      put(s.q(j));
    for (int j = 0; j < n; ++j)
      put(s.dq(j));
    for (int a = 0; a < 3; ++a)
      put(r.com(a));
    for (int a = 0; a < 3; ++a)
      put(r.com_ref(a));
    put(r.com_height);
    for (std::size_t l = 0; l < levels; ++l)
      put(l < r.residual.size() ? r.residual[l] : std::nan(""));
    for (int j = 0; j < n; ++j)
      put(r.tau_opt.size() == n ? r.tau_opt(j) : 0.0);
    for (int j = 0; j < n; ++j)
      put(r.current.size() == n ? r.current(j) : 0.0);
    for (const FootLog& f : r.feet) {
      for (int a = 0; a < 6; ++a)
        put(f.force_opt(a));
      for (int a = 0; a < 6; ++a)
        put(f.wrench(a));
      put(f.measured_zmp.position.x());
      put(f.measured_zmp.position.y());
      out << ',' << int(f.measured_zmp.valid);
      put(f.optimized_zmp.position.x());
      put(f.optimized_zmp.position.y());
      out << ',' << int(f.optimized_zmp.valid);
      out << ',' << int(f.contact) << ',' << f.corners;
      put(f.position_error);
      put(f.orientation_error);
    }
    out << ',' << int(r.degraded);
    put(r.max_violation);
    put(r.timing.total * 1e3);
    put(r.timing.qp * 1e3);
    put(r.timing.projection * 1e3);
    out << '\n';
  }
}

}  // namespace wbc
