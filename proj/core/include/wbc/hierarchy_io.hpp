#pragma once

#include <string>
#include <vector>

#include "wbc/hqp.hpp"

namespace wbc {

/// A standalone hierarchy as read from a document:
///
///   n_x: 2
///   levels:
///     - name: bounds
///       A: [[1, 0]]        # rows of n_x entries, may be omitted
///       b: [1]
///       D: [[0, -1]]
///       f: [1]
struct HierarchyProblem
{
  int n_x = 0;
  std::vector<Level> levels;
};

/// Throws ParseError on malformed documents and inconsistent dimensions.
HierarchyProblem load_hierarchy(const std::string& text);
HierarchyProblem load_hierarchy_file(const std::string& path);

std::string serialize_hierarchy(const HierarchyProblem& problem);

}  // namespace wbc
