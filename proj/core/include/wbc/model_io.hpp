#pragma once

#include <string>

#include "wbc/document.hpp"
#include "wbc/model.hpp"

namespace wbc {

/// Parses a model document. Throws ParseError for malformed text and
/// ModelError when the described robot violates a model invariant.
///
/// Layout (YAML syntax):
///
///   name: pendulum
///   floating_base: false
///   gravity: [0, 0, -9.81]          # optional
///   links:
///     - {name: rod, mass: 1, com: [0, 0, -0.5],
///        inertia: [ixx, ixy, ixz, iyy, iyz, izz]}   # about the link origin
///   joints:
///     - name: hinge
///       parent: world                 # or a link name
///       child: rod
///       axis: [0, -1, 0]
///       origin: {xyz: [0, 0, 0], rpy: [0, 0, 0]}
///       limits: {position: [-3.2, 3.2], velocity: 10, torque: [-50, 50]}
///       gear_ratio: 1
///       current_torque_coeff: 1
///       friction: {coulomb: 0, viscous: 0}
///   contacts:
///     - {name: sole, link: rod, offset: {xyz: [0, 0, -1], rpy: [0, 0, 0]},
///        sole: [0.12, 0.12, 0.06, 0.06], mu: 0.6}   # l_x-, l_x+, l_y-, l_y+
RobotModel load_model(const std::string& text);
RobotModel load_model_file(const std::string& path);

std::string serialize_model(const ModelDescription& description);
inline std::string serialize_model(const RobotModel& model)
{
  return serialize_model(model.description());
}

}  // namespace wbc
