#include "wbc/model_io.hpp"

#include <sstream>

#include "yaml_util.hpp"

namespace wbc {

using namespace detail;

namespace {

void read_pose(const YAML::Node& parent, const std::string& key, const std::string& path,
               Eigen::Vector3d& xyz, Eigen::Vector3d& rpy)
{
  const YAML::Node pose = parent[key];
  if (!pose.IsDefined() || pose.IsNull())
    return;
  const std::string p = join(path, key);
  if (!pose.IsMap())
    fail_at(pose, p, "expected {xyz: [..], rpy: [..]}");
  xyz = get_vector(pose, "xyz", p, 3, Eigen::VectorXd(Eigen::Vector3d::Zero()));
  rpy = get_vector(pose, "rpy", p, 3, Eigen::VectorXd(Eigen::Vector3d::Zero()));
}

LinkParams read_link(const YAML::Node& node, const std::string& path)
{
  LinkParams link;
  link.name = get_string(node, "name", path);
  link.mass = get_double(node, "mass", path);
  link.com = get_vector(node, "com", path, 3, Eigen::VectorXd(Eigen::Vector3d::Zero()));
  const Eigen::VectorXd I = get_vector(node, "inertia", path, 6);
  link.inertia << I(0), I(1), I(2),
                  I(1), I(3), I(4),
                  I(2), I(4), I(5);
  return link;
}

JointParams read_joint(const YAML::Node& node, const std::string& path)
{
  JointParams j;
  j.name = get_string(node, "name", path);
  j.parent = get_string(node, "parent", path);
  j.child = get_string(node, "child", path);
  j.axis = get_vector(node, "axis", path, 3);
  read_pose(node, "origin", path, j.origin_xyz, j.origin_rpy);

  const YAML::Node limits = node["limits"];
  if (limits.IsDefined() && !limits.IsNull()) {
    const std::string lp = join(path, "limits");
    if (!limits.IsMap())
      fail_at(limits, lp, "expected a mapping");
    const Eigen::VectorXd pos = get_vector(limits, "position", lp, 2,
                                           Eigen::VectorXd(Eigen::Vector2d(j.position_min, j.position_max)));
    j.position_min = pos(0);
    j.position_max = pos(1);
    j.velocity_limit = get_double(limits, "velocity", lp, j.velocity_limit);
    const Eigen::VectorXd tau = get_vector(limits, "torque", lp, 2,
                                           Eigen::VectorXd(Eigen::Vector2d(j.torque_min, j.torque_max)));
    j.torque_min = tau(0);
    j.torque_max = tau(1);
  }
  j.gear_ratio = get_double(node, "gear_ratio", path, 1.0);
  j.current_torque_coeff = get_double(node, "current_torque_coeff", path, 1.0);

  const YAML::Node friction = node["friction"];
  if (friction.IsDefined() && !friction.IsNull()) {
    const std::string fp = join(path, "friction");
    j.friction.coulomb = get_double(friction, "coulomb", fp, 0.0);
    j.friction.viscous = get_double(friction, "viscous", fp, 0.0);
  }
  return j;
}

ContactParams read_contact(const YAML::Node& node, const std::string& path)
{
  ContactParams c;
  c.name = get_string(node, "name", path);
  c.link = get_string(node, "link", path);
  read_pose(node, "offset", path, c.offset_xyz, c.offset_rpy);
  const Eigen::VectorXd sole =
      get_vector(node, "sole", path, 4,
                 Eigen::VectorXd(Eigen::Vector4d(c.lx_minus, c.lx_plus, c.ly_minus, c.ly_plus)));
  c.lx_minus = sole(0);
  c.lx_plus = sole(1);
  c.ly_minus = sole(2);
  c.ly_plus = sole(3);
  c.mu = get_double(node, "mu", path, c.mu);
  return c;
}

template <typename Item, typename Reader>
std::vector<Item> read_list(const YAML::Node& root, const std::string& key, bool required,
                            Reader reader)
{
  std::vector<Item> items;
  const YAML::Node list = root[key];
  if (!list.IsDefined() || list.IsNull()) {
    if (required)
      require(root, key, "");
    return items;
  }
  if (!list.IsSequence())
    fail_at(list, key, "expected a list");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index_path(key, i);
    if (!list[i].IsMap())
      fail_at(list[i], path, "expected a mapping");
    items.push_back(reader(list[i], path));
  }
  return items;
}

std::string pose_text(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy)
{
  return "{xyz: " + vector_text(xyz) + ", rpy: " + vector_text(rpy) + "}";
}

}  // namespace

RobotModel load_model(const std::string& text)
{
  const YAML::Node root = parse_document(text);
  ModelDescription d;
  d.name = get_string(root, "name", "", "robot");
  d.floating_base = get_bool(root, "floating_base", "", false);
  d.gravity = get_vector(root, "gravity", "", 3, Eigen::VectorXd(d.gravity));
  d.links = read_list<LinkParams>(root, "links", true, read_link);
  d.joints = read_list<JointParams>(root, "joints", false, read_joint);
  d.contacts = read_list<ContactParams>(root, "contacts", false, read_contact);
  return RobotModel(std::move(d));
}

RobotModel load_model_file(const std::string& path)
{
  return load_model(read_text_file(path));
}

std::string serialize_model(const ModelDescription& d)
{
  std::ostringstream out;
  out << "name: \"" << d.name << "\"\n";
  out << "floating_base: " << (d.floating_base ? "true" : "false") << "\n";
  out << "gravity: " << vector_text(d.gravity) << "\n";
  out << "links:\n";
  for (const auto& l : d.links) {
    const auto& I = l.inertia;
    Eigen::VectorXd six(6);
    six << I(0, 0), I(0, 1), I(0, 2), I(1, 1), I(1, 2), I(2, 2);
    out << "  - name: \"" << l.name << "\"\n"
        << "    mass: " << format_double(l.mass) << "\n"
        << "    com: " << vector_text(l.com) << "\n"
        << "    inertia: " << vector_text(six) << "\n";
  }
  if (!d.joints.empty()) {
    out << "joints:\n";
    for (const auto& j : d.joints) {
      out << "  - name: \"" << j.name << "\"\n"
          << "    parent: \"" << j.parent << "\"\n"
          << "    child: \"" << j.child << "\"\n"
          << "    axis: " << vector_text(j.axis) << "\n"
          << "    origin: " << pose_text(j.origin_xyz, j.origin_rpy) << "\n"
          << "    limits: {position: " << vector_text(Eigen::Vector2d(j.position_min, j.position_max))
          << ", velocity: " << format_double(j.velocity_limit)
          << ", torque: " << vector_text(Eigen::Vector2d(j.torque_min, j.torque_max)) << "}\n"
          << "    gear_ratio: " << format_double(j.gear_ratio) << "\n"
          << "    current_torque_coeff: " << format_double(j.current_torque_coeff) << "\n"
          << "    friction: {coulomb: " << format_double(j.friction.coulomb)
          << ", viscous: " << format_double(j.friction.viscous) << "}\n";
    }
  }
  if (!d.contacts.empty()) {
    out << "contacts:\n";
    for (const auto& c : d.contacts) {
      out << "  - name: \"" << c.name << "\"\n"
          << "    link: \"" << c.link << "\"\n"
          << "    offset: " << pose_text(c.offset_xyz, c.offset_rpy) << "\n"
          << "    sole: " << vector_text(Eigen::Vector4d(c.lx_minus, c.lx_plus, c.ly_minus, c.ly_plus)) << "\n"
          << "    mu: " << format_double(c.mu) << "\n";
    }
  }
  return out.str();
}

}  // namespace wbc
