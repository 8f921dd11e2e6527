#pragma once

#include <initializer_list>
#include <optional>
#include <string>

#include <Eigen/Core>
#include <yaml-cpp/yaml.h>

#include "wbc/document.hpp"

namespace wbc::detail {

YAML::Node parse_document(const std::string& text);

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& path, const std::string& msg);

inline std::string join(const std::string& path, const std::string& key)
{
  return path.empty() ? key : path + "." + key;
}

inline std::string index_path(const std::string& path, std::size_t i)
{
  return path + "[" + std::to_string(i) + "]";
}

/// Child lookup that reports the parent's location when the key is missing.
YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& path);

double as_double(const YAML::Node& node, const std::string& path);
int as_int(const YAML::Node& node, const std::string& path);
bool as_bool(const YAML::Node& node, const std::string& path);
std::string as_string(const YAML::Node& node, const std::string& path);
Eigen::VectorXd as_vector(const YAML::Node& node, const std::string& path, int expected_size = -1);
Eigen::MatrixXd as_matrix(const YAML::Node& node, const std::string& path, int cols = -1);

double get_double(const YAML::Node& parent, const std::string& key, const std::string& path,
                  std::optional<double> fallback = std::nullopt);
bool get_bool(const YAML::Node& parent, const std::string& key, const std::string& path,
              std::optional<bool> fallback = std::nullopt);
std::string get_string(const YAML::Node& parent, const std::string& key, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt);
Eigen::VectorXd get_vector(const YAML::Node& parent, const std::string& key,
                           const std::string& path, int expected_size,
                           std::optional<Eigen::VectorXd> fallback = std::nullopt);

/// Rejects keys of a mapping that are not in `allowed`.
void check_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<const char*> allowed);

/// Child mapping, or an undefined node when the key is absent.
YAML::Node optional_map(const YAML::Node& parent, const std::string& key, const std::string& path);

std::string vector_text(const Eigen::VectorXd& v);

}  // namespace wbc::detail
