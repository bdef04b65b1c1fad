#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rabic/numerics.hpp"

namespace rabic::dynamics {

using numerics::Matrix;
using numerics::Vector;
using Vector2 = Eigen::Vector2d;

/// Force (N) x3 followed by torque (N m) x3. This is the wrench the end effector
/// applies to the environment; the environment pushes back with its negative.
using Wrench = Eigen::Matrix<double, 6, 1>;

struct Link {
  double mass = 1.0;     // kg
  double length = 1.0;   // m
  double com = 0.5;      // m from the proximal joint
  double inertia = 0.0;  // kg m^2 about the center of mass
};

/// Differential-drive base under pure rolling. Generalized coordinates are the
/// right and left wheel angles; the heading is r (theta_R - theta_L) / (2 b).
struct BaseSpec {
  double wheel_radius = 0.1;     // m
  double half_track = 0.25;      // m
  double chassis_mass = 20.0;    // kg
  double chassis_inertia = 1.0;  // kg m^2
  double mount_offset = 0.0;     // m ahead of the axle midpoint
};

struct RobotParams {
  std::optional<BaseSpec> base;
  std::vector<Link> links;
  double gravity = 9.81;  // m/s^2
  /// Gravity acts in the plane along +x, so the all-zero arm hangs straight down.
  /// Must be false when a wheeled base is present (the base then moves on a
  /// horizontal floor and gravity only loads the floor contacts).
  bool in_plane_gravity = false;
  std::vector<double> friction;  // viscous, N m s/rad per joint; empty = none
};

/// Immutable, validated robot description. Joint order is [theta_R, theta_L,
/// theta_1 .. theta_nm] with a base, [theta_1 .. theta_nm] without.
class RobotModel {
 public:
  explicit RobotModel(RobotParams params);

  int base_dofs() const { return params_.base ? 2 : 0; }
  int arm_dofs() const { return static_cast<int>(params_.links.size()); }
  int dofs() const { return base_dofs() + arm_dofs(); }
  bool has_base() const { return params_.base.has_value(); }
  const RobotParams& params() const { return params_; }
  const std::vector<Link>& links() const { return params_.links; }
  const Vector& friction() const { return friction_; }

  /// Heading of the base (0 for a fixed base).
  double heading(const Vector& theta) const;

 private:
  RobotParams params_;
  Vector friction_;
};

struct DynamicsTerms {
  Matrix D;  // n x n inertia
  Matrix C;  // n x n Coriolis/centrifugal, Christoffel construction
  Vector G;  // n gravity
  Matrix J;  // 6 x n coupled end-effector Jacobian [J_b J_m]
};

/// D, C, G and the coupled Jacobian at (theta, theta_dot).
DynamicsTerms compute_terms(const RobotModel& model, const Vector& theta, const Vector& theta_dot);

/// Inertia matrix and its partial derivatives dD/dtheta_i.
struct InertiaDerivatives {
  Matrix D;
  std::vector<Matrix> dD;
};
InertiaDerivatives inertia_with_derivatives(const RobotModel& model, const Vector& theta);

/// 6 x n coupled Jacobian of the end-effector tip.
Matrix end_effector_jacobian(const RobotModel& model, const Vector& theta);

/// Potential energy, zero at the arm root height. Zero for a wheeled base.
double potential_energy(const RobotModel& model, const Vector& theta);

/// Solves D theta_ddot = tau_r + tau_u - C theta_dot - G - J^T f_e.
/// Throws NumericError when cond(D) exceeds 1e12.
Vector forward_dynamics(const RobotModel& model, const Vector& theta, const Vector& theta_dot,
                        const Vector& tau_r, const Vector& tau_u, const Wrench& f_e);

/// Same, with precomputed terms.
Vector forward_dynamics(const DynamicsTerms& terms, const Vector& theta_dot, const Vector& tau_r,
                        const Vector& tau_u, const Wrench& f_e);

inline constexpr double kMaxInertiaCondition = 1e12;

/// Planar pose of the end effector: position (m) and orientation (rad).
struct PlanarPose {
  Vector2 position = Vector2::Zero();
  double orientation = 0.0;
};

/// Planar twist: linear velocity (m/s) and angular rate (rad/s).
struct PlanarTwist {
  Vector2 linear = Vector2::Zero();
  double angular = 0.0;
};

struct EndEffectorState {
  PlanarPose pose;
  PlanarTwist velocity;
};

/// Forward kinematics. base_position is the world position of the axle midpoint;
/// it is not a function of the wheel angles and must be integrated separately
/// (see base_velocity). Ignored for fixed-base arms.
EndEffectorState end_effector_state(const RobotModel& model, const Vector& theta,
                                    const Vector& theta_dot,
                                    const Vector2& base_position = Vector2::Zero());

/// World-frame velocity of the axle midpoint. Zero for fixed-base arms.
Vector2 base_velocity(const RobotModel& model, const Vector& theta, const Vector& theta_dot);

/// Kinetic plus potential energy.
double total_energy(const RobotModel& model, const Vector& theta, const Vector& theta_dot);

/// Viscous joint friction torque, -friction .* theta_dot.
Vector friction_torque(const RobotModel& model, const Vector& theta_dot);

}  // namespace rabic::dynamics
