#pragma once

#include "wbc/model.hpp"

namespace wbc {

/// Mass and geometry constants of the built-in 12-DoF biped.
namespace walker3 {
inline constexpr double kTotalMass = 43.0;
inline constexpr double kTorsoMassFraction = 0.55;
inline constexpr double kLegMassFraction = 0.225;
/// Fractions of one leg's mass, hip yaw link to foot.
inline constexpr double kLegLinkFractions[6] = {0.24, 0.20, 0.18, 0.16, 0.12, 0.10};
inline constexpr double kHipWidth = 0.10;      // lateral hip offset from the pelvis
inline constexpr double kHipStack = 0.10;      // yaw -> roll -> pitch axis spacing
inline constexpr double kThighLength = 0.38;
inline constexpr double kShankLength = 0.38;
inline constexpr double kAnkleToSole = 0.08;
inline constexpr double kTorsoHeight = 0.66;   // pelvis to top of head
inline constexpr double kNominalKneeBend = 0.6;
}  // namespace walker3

/// Floating-base biped with 6 joints per leg (hip yaw/roll/pitch, knee,
/// ankle pitch/roll), 43 kg, two sole contacts "l_sole" and "r_sole".
/// The torso center of mass is placed so that the whole-body CoM lies above
/// the midpoint of the soles in the nominal stance.
RobotModel build_walker3_like();

/// Nominal double-support stance of build_walker3_like(): knees bent, feet
/// flat, soles at z = 0.
RobotState walker3_nominal_state(const RobotModel& model);

/// Left leg of the biped on a fixed base (hip yaw attached to the world).
RobotModel build_walker3_leg();

/// Fixed-base planar chains of unit-mass, unit-length rods rotating about
/// -y. At q = 0 they hang along -z.
RobotModel build_pendulum();
RobotModel build_planar_double();
RobotModel build_planar_triple();
RobotModel build_planar_chain(int links, double length = 1.0, double mass = 1.0);

}  // namespace wbc
