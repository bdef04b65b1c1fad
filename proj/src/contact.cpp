#include "rabic/contact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rabic::dynamics {
namespace {

struct Penetration {
  double depth = 0.0;
  Vector2 normal = Vector2::Zero();  // outward obstacle normal at the contact
};

Penetration find_penetration(const ContactModel& contact, const ObstacleState& obstacle,
                             const Vector2& point) {
  const Vector2 center = contact.center + Vector2(obstacle.offset, 0.0);
  Penetration out;
  if (contact.shape == ObstacleShape::kWall) {
    const double depth = -(point - center).dot(contact.normal);
    if (depth > 0.0) {
      out.depth = depth;
      out.normal = contact.normal;
    }
    return out;
  }
  const Vector2 d = point - center;
  const Vector2 h = contact.half_extents;
  if (std::abs(d.x()) >= h.x() || std::abs(d.y()) >= h.y()) return out;
  // Exit through the nearest face.
  const double faces[4] = {h.x() - d.x(), h.x() + d.x(), h.y() - d.y(), h.y() + d.y()};
  const Vector2 normals[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  const int best = static_cast<int>(std::min_element(faces, faces + 4) - faces);
  out.depth = faces[best];
  out.normal = normals[best];
  return out;
}

}  // namespace

void validate(const ContactModel& contact) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(contact.stiffness > 0.0) || !finite(contact.stiffness)) {
    throw ConfigError("contact.stiffness must be positive");
  }
  if (!(contact.damping >= 0.0) || !finite(contact.damping)) {
    throw ConfigError("contact.damping must be nonnegative");
  }
  if (!(contact.friction >= 0.0) || !finite(contact.friction)) {
    throw ConfigError("contact.friction must be nonnegative");
  }
  if (!(contact.ground_friction >= 0.0) || !finite(contact.ground_friction)) {
    throw ConfigError("contact.ground_friction must be nonnegative");
  }
  if (!(contact.mass > 0.0) || !finite(contact.mass)) {
    throw ConfigError("contact.mass must be positive");
  }
  if (!(contact.slip_velocity > 0.0)) throw ConfigError("contact.slip_velocity must be positive");
  if (!contact.center.allFinite()) throw ConfigError("contact.center must be finite");
  if (contact.shape == ObstacleShape::kBox) {
    if (!(contact.half_extents.x() > 0.0) || !(contact.half_extents.y() > 0.0)) {
      throw ConfigError("contact.half_extents must be positive");
    }
  } else {
    const double norm = contact.normal.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9) {
      throw ConfigError("contact.normal must be a unit vector");
    }
  }
}

double penetration_depth(const ContactModel& contact, const ObstacleState& obstacle,
                         const Vector2& point) {
  return find_penetration(contact, obstacle, point).depth;
}

Wrench contact_wrench(const ContactModel& contact, const ObstacleState& obstacle,
                      const PlanarPose& ee_pose, const PlanarTwist& ee_velocity) {
  Wrench f_e = Wrench::Zero();
  const Penetration pen = find_penetration(contact, obstacle, ee_pose.position);
  if (pen.depth <= 0.0) return f_e;

  const double obstacle_speed = contact.pushable ? obstacle.velocity : 0.0;
  const Vector2 relative = ee_velocity.linear - Vector2(obstacle_speed, 0.0);
  const double depth_rate = -relative.dot(pen.normal);
  const double normal_force =
      std::max(0.0, contact.stiffness * pen.depth + contact.damping * depth_rate);

  const Vector2 tangent(-pen.normal.y(), pen.normal.x());
  const double slip = relative.dot(tangent);
  const double ratio = std::clamp(slip / contact.slip_velocity, -1.0, 1.0);
  const double tangential_force = -contact.friction * normal_force * ratio;

  // Reaction on the end effector; f_e is its negative.
  const Vector2 reaction = normal_force * pen.normal + tangential_force * tangent;
  f_e.head<2>() = -reaction;
  return f_e;
}

ObstacleState step_obstacle(const ContactModel& contact, const ObstacleState& obstacle,
                            const Wrench& f_e, double gravity, double dt) {
  if (!contact.pushable) return obstacle;
  const double push = f_e(0);
  const double max_friction = contact.ground_friction * contact.mass * gravity;
  ObstacleState next = obstacle;
  double accel = 0.0;
  if (obstacle.velocity == 0.0) {
    if (std::abs(push) <= max_friction) return next;
    accel = (push - numerics::sign(push) * max_friction) / contact.mass;
  } else {
    accel = (push - numerics::sign(obstacle.velocity) * max_friction) / contact.mass;
  }
  next.velocity = obstacle.velocity + accel * dt;
  if (obstacle.velocity != 0.0 && numerics::sign(next.velocity) != numerics::sign(obstacle.velocity)) {
    next.velocity = 0.0;
  }
  next.offset = obstacle.offset + next.velocity * dt;
  return next;
}

}  // namespace rabic::dynamics
