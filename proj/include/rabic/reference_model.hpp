#pragma once

#include <vector>

#include "rabic/dynamics.hpp"

namespace rabic::reference {

using numerics::Matrix;
using numerics::Vector;

/// Target joint-space impedance: diagonal inertia M_r, damping B_r and
/// stiffness K_r (stored as their diagonals) plus the desired torque tau_d.
struct ImpedanceParams {
  Vector inertia;    // kg m^2
  Vector damping;    // N m s/rad
  Vector stiffness;  // N m/rad
  Vector tau_d;      // N m

  int size() const { return static_cast<int>(inertia.size()); }
  /// Throws ConfigError unless every diagonal entry is strictly positive and all
  /// vectors have the same length.
  void validate() const;
};

struct ReferenceState {
  Vector theta_r;
  Vector theta_r_dot;
};

/// Desired joint position, velocity and acceleration at one instant.
struct DesiredPoint {
  Vector theta;
  Vector theta_dot;
  Vector theta_ddot;
};

/// Reference acceleration of the impedance model:
///   M_r (thr_dd - thd_dd) + B_r (thr_d - thd_d) + K_r (thr - thd) = tau_d - J^T f_e
Vector reference_accel(const ImpedanceParams& imp, const ReferenceState& ref,
                       const DesiredPoint& des, const dynamics::Wrench& f_e, const Matrix& J);

/// One RK4 step of the impedance model with des and f_e held over the step.
/// t only labels numeric errors.
ReferenceState step_reference(const ImpedanceParams& imp, const ReferenceState& ref,
                              const DesiredPoint& des, const dynamics::Wrench& f_e,
                              const Matrix& J, double dt, double t = 0.0);

/// Settled value of theta_r - theta_d under constant inputs: K_r^{-1}(tau_d - J^T f_e).
Vector steady_state_offset(const ImpedanceParams& imp, const Vector& tau_d,
                           const Vector& jacobian_transpose_wrench);

/// Per-joint desired signal.
struct JointTrajectory {
  enum class Kind {
    kConstant,          // amplitude
    kSinusoid,          // amplitude sin(omega t / horizon)
    kSmoothedSinusoid,  // amplitude sin(omega t) (1 - exp(-omega t)(1 + omega t))
  };
  Kind kind = Kind::kConstant;
  double amplitude = 0.0;  // rad
  double omega = 0.0;      // rad (kSinusoid) or rad/s (kSmoothedSinusoid)
};

struct TrajectorySpec {
  std::vector<JointTrajectory> joints;
  double horizon = 1.0;  // s

  void validate() const;
};

/// Analytic evaluation of the desired signal and its first two derivatives.
/// Throws DomainError for t < 0.
DesiredPoint desired_point(const TrajectorySpec& spec, double t);

}  // namespace rabic::reference
