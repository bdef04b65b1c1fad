#pragma once

#include "rabic/dynamics.hpp"

namespace rabic::dynamics {

enum class ObstacleShape { kBox, kWall };

/// Compliant penalty contact between the end-effector tip and one obstacle.
///
/// Normal force is stiffness * depth + damping * depth_rate, clamped at zero so
/// the contact never pulls. Tangential force is a Coulomb clamp of magnitude
/// friction * normal force opposing the tangential slip velocity, regularized
/// linearly below slip_velocity so the force is continuous through zero slip.
struct ContactModel {
  ObstacleShape shape = ObstacleShape::kWall;
  Vector2 center = Vector2::Zero();        // box center, or any point on the wall
  Vector2 half_extents = Vector2::Zero();  // box only, m
  Vector2 normal = {-1.0, 0.0};            // wall only: unit normal pointing into free space
  double stiffness = 1e4;                  // N/m
  double damping = 50.0;                   // N s/m
  double friction = 0.9;                   // end effector against obstacle
  double ground_friction = 0.9;            // obstacle against the floor (pushable only)
  double mass = 1.0;                       // kg
  bool pushable = false;                   // slides along world x when pushed
  double slip_velocity = 1e-3;             // m/s
};

/// Translational state of a pushable obstacle along world x.
struct ObstacleState {
  double offset = 0.0;    // m
  double velocity = 0.0;  // m/s
};

/// Throws ConfigError when a parameter is out of range.
void validate(const ContactModel& contact);

/// Wrench the end effector applies to the obstacle. Zero when not penetrating.
Wrench contact_wrench(const ContactModel& contact, const ObstacleState& obstacle,
                      const PlanarPose& ee_pose, const PlanarTwist& ee_velocity);

/// Penetration depth (m) of the tip, 0 when outside.
double penetration_depth(const ContactModel& contact, const ObstacleState& obstacle,
                         const Vector2& point);

/// One semi-implicit Euler step of a pushable obstacle under the push f_e and
/// Coulomb floor friction with stiction. Fixed obstacles are returned unchanged.
ObstacleState step_obstacle(const ContactModel& contact, const ObstacleState& obstacle,
                            const Wrench& f_e, double gravity, double dt);

/// Magnitude of the force part of a wrench.
inline double force_magnitude(const Wrench& w) { return w.head<3>().norm(); }

}  // namespace rabic::dynamics
