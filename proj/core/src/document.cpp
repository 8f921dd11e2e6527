#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "yaml_util.hpp"

namespace wbc {

std::string read_text_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open file '" + path + "'", 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace detail {

YAML::Node parse_document(const std::string& text)
{
  try {
    YAML::Node root = YAML::Load(text);
    if (!root.IsMap())
      throw ParseError("document must be a mapping of keys to values", 1, "");
    return root;
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1, "");
  }
}

void fail_at(const YAML::Node& node, const std::string& path, const std::string& msg)
{
  int line = 0;
  if (node.IsDefined() && !node.Mark().is_null())
    line = node.Mark().line + 1;
  throw ParseError(msg, line, path);
}

YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& path)
{
  if (!parent.IsMap())
    fail_at(parent, path, "expected a mapping");
  YAML::Node child = parent[key];
  if (!child.IsDefined() || child.IsNull())
    fail_at(parent, join(path, key), "missing required field");
  return child;
}

double as_double(const YAML::Node& node, const std::string& path)
{
  if (!node.IsScalar())
    fail_at(node, path, "expected a number");
  const std::string& s = node.Scalar();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      fail_at(node, path, "expected a number, got '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail_at(node, path, "expected a number, got '" + s + "'");
  } catch (const std::out_of_range&) {
    fail_at(node, path, "number out of range: '" + s + "'");
  }
}

int as_int(const YAML::Node& node, const std::string& path)
{
  const double v = as_double(node, path);
  if (std::floor(v) != v)
    fail_at(node, path, "expected an integer");
  return static_cast<int>(v);
}

bool as_bool(const YAML::Node& node, const std::string& path)
{
  if (!node.IsScalar())
    fail_at(node, path, "expected true or false");
  const std::string& s = node.Scalar();
  if (s == "true" || s == "True" || s == "1")
    return true;
  if (s == "false" || s == "False" || s == "0")
    return false;
  fail_at(node, path, "expected true or false, got '" + s + "'");
}

std::string as_string(const YAML::Node& node, const std::string& path)
{
  if (!node.IsScalar())
    fail_at(node, path, "expected a string");
  return node.Scalar();
}

Eigen::VectorXd as_vector(const YAML::Node& node, const std::string& path, int expected_size)
{
  if (!node.IsSequence())
    fail_at(node, path, "expected a list of numbers");
  if (expected_size >= 0 && static_cast<int>(node.size()) != expected_size)
    fail_at(node, path,
            "expected " + std::to_string(expected_size) + " numbers, got " +
                std::to_string(node.size()));
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = as_double(node[i], index_path(path, i));
  return v;
}

Eigen::MatrixXd as_matrix(const YAML::Node& node, const std::string& path, int cols)
{
  if (!node.IsSequence())
    fail_at(node, path, "expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::MatrixXd M(rows, std::max(cols, 0));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_path = index_path(path, static_cast<std::size_t>(r));
    const Eigen::VectorXd row = as_vector(node[static_cast<std::size_t>(r)], row_path);
    if (cols < 0) {
      cols = static_cast<int>(row.size());
      M.resize(rows, cols);
    }
    if (row.size() != cols)
      fail_at(node[static_cast<std::size_t>(r)], row_path,
              "row has " + std::to_string(row.size()) + " entries, expected " +
                  std::to_string(cols));
    M.row(r) = row.transpose();
  }
  if (cols < 0)
    M.resize(0, 0);
  return M;
}

double get_double(const YAML::Node& parent, const std::string& key, const std::string& path,
                  std::optional<double> fallback)
{
  const YAML::Node n = parent[key];
  if ((!n.IsDefined() || n.IsNull()) && fallback)
    return *fallback;
  return as_double(require(parent, key, path), join(path, key));
}

bool get_bool(const YAML::Node& parent, const std::string& key, const std::string& path,
              std::optional<bool> fallback)
{
  const YAML::Node n = parent[key];
  if ((!n.IsDefined() || n.IsNull()) && fallback)
    return *fallback;
  return as_bool(require(parent, key, path), join(path, key));
}

std::string get_string(const YAML::Node& parent, const std::string& key, const std::string& path,
                       std::optional<std::string> fallback)
{
  const YAML::Node n = parent[key];
  if ((!n.IsDefined() || n.IsNull()) && fallback)
    return *fallback;
  return as_string(require(parent, key, path), join(path, key));
}

Eigen::VectorXd get_vector(const YAML::Node& parent, const std::string& key,
                           const std::string& path, int expected_size,
                           std::optional<Eigen::VectorXd> fallback)
{
  const YAML::Node n = parent[key];
  if ((!n.IsDefined() || n.IsNull()) && fallback)
    return *fallback;
  return as_vector(require(parent, key, path), join(path, key), expected_size);
}

void check_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<const char*> allowed)
{
  if (!node.IsMap())
    fail_at(node, path, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed)
      known = known || key == a;
    if (!known)
      fail_at(kv.first, join(path, key), "unknown key");
  }
}

YAML::Node optional_map(const YAML::Node& parent, const std::string& key, const std::string& path)
{
  YAML::Node n = parent[key];
  if (!n.IsDefined() || n.IsNull())
    return YAML::Node(YAML::NodeType::Undefined);
  if (!n.IsMap())
    fail_at(n, join(path, key), "expected a mapping");
  return n;
}

std::string vector_text(const Eigen::VectorXd& v)
{
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i)
      out += ", ";
    out += format_double(v(i));
  }
  return out + "]";
}

}  // namespace detail
}  // namespace wbc
