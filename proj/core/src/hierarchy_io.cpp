#include "wbc/hierarchy_io.hpp"

#include <sstream>

#include "yaml_util.hpp"

namespace wbc {

using namespace detail;

namespace {

Eigen::MatrixXd read_block(const YAML::Node& level, const char* key, const std::string& path, int n_x)
{
  const YAML::Node n = level[key];
  if (!n.IsDefined() || n.IsNull() || (n.IsSequence() && n.size() == 0))
    return Eigen::MatrixXd(0, n_x);
  return as_matrix(n, join(path, key), n_x);
}

Eigen::VectorXd read_rhs(const YAML::Node& level, const char* key, const std::string& path, int rows)
{
  const YAML::Node n = level[key];
  if (!n.IsDefined() || n.IsNull()) {
    if (rows > 0)
      fail_at(level, join(path, key), "missing, the matrix has " + std::to_string(rows) + " rows");
    return Eigen::VectorXd(0);
  }
  if (n.IsSequence() && n.size() == 0 && rows == 0)
    return Eigen::VectorXd(0);
  return as_vector(n, join(path, key), rows);
}

void write_matrix(std::ostream& out, const char* key, const Eigen::MatrixXd& M)
{
  out << "    " << key << ": [";
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    out << (r ? ", " : "") << vector_text(M.row(r).transpose());
  out << "]\n";
}

}  // namespace

HierarchyProblem load_hierarchy(const std::string& text)
{
  const YAML::Node root = parse_document(text);
  check_keys(root, "", {"n_x", "levels"});
  HierarchyProblem p;
  p.n_x = as_int(require(root, "n_x", ""), "n_x");
  if (p.n_x < 1)
    fail_at(root["n_x"], "n_x", "must be positive");
  const YAML::Node levels = require(root, "levels", "");
  if (!levels.IsSequence() || levels.size() == 0)
    fail_at(levels, "levels", "expected a non-empty list");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string path = index_path("levels", i);
    const YAML::Node l = levels[i];
    check_keys(l, path, {"name", "A", "b", "D", "f"});
    Level level;
    level.name = get_string(l, "name", path, "level" + std::to_string(i + 1));
    level.A = read_block(l, "A", path, p.n_x);
    level.b = read_rhs(l, "b", path, static_cast<int>(level.A.rows()));
    level.D = read_block(l, "D", path, p.n_x);
    level.f = read_rhs(l, "f", path, static_cast<int>(level.D.rows()));
    p.levels.push_back(std::move(level));
  }
  return p;
}

HierarchyProblem load_hierarchy_file(const std::string& path)
{
  return load_hierarchy(read_text_file(path));
}

std::string serialize_hierarchy(const HierarchyProblem& problem)
{
  std::ostringstream out;
  out << "n_x: " << problem.n_x << "\nlevels:\n";
  for (const Level& l : problem.levels) {
    out << "  - name: " << (l.name.empty() ? "level" : l.name) << '\n';
    write_matrix(out, "A", l.A);
    out << "    b: " << vector_text(l.b) << '\n';
    write_matrix(out, "D", l.D);
    out << "    f: " << vector_text(l.f) << '\n';
  }
  return out.str();
}

}  // namespace wbc
