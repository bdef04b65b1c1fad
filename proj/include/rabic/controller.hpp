#pragma once

#include <cmath>

#include "rabic/estimator.hpp"
#include "rabic/reference_model.hpp"

namespace rabic::control {

using numerics::Matrix;
using numerics::Vector;

/// Backstepping gains. l is the finite-time order, restricted to (0.5, 1) so
/// that every fractional power of a possibly-zero base stays nonnegative except
/// the guarded |xi1|^(2(l-1)) factor.
struct GainSet {
  Vector k1;
  Vector k2;
  double l = 0.999;
  Vector mu;      // 1/s, weight of e in xi2 = e_dot + mu e
  Matrix D_hat;   // nominal inertia, symmetric positive definite
  double sign_smoothing_eps = 0.0;  // 0 = exact sign in the robust term
  double xi1_guard_eps = 1e-3;

  int size() const { return static_cast<int>(k1.size()); }
  void validate(int dofs) const;
};

struct PdGains {
  Vector kp;
  Vector kd;
  /// Gains may be zero (a passive joint) but not negative.
  void validate(int dofs) const;
};

/// Inner-loop error coordinates, per joint.
struct ErrorCoordinates {
  Vector e;      // theta_r - theta
  Vector e_dot;
  Vector xi1;    // running integral of xi2
  Vector xi2;    // e_dot + mu e
  Vector s;      // xi2 + k1 sigpow(xi1, 2l - 1)
};

/// Surface s from (xi1, xi2) using the signed power.
Vector surface(const Vector& xi1, const Vector& xi2, const GainSet& gains);

/// Coordinates at controller start: xi1 = 0.
ErrorCoordinates initial_error_coords(const reference::ReferenceState& ref, const Vector& theta,
                                      const Vector& theta_dot, const GainSet& gains);

/// Coordinates one step after `previous`, with xi1 advanced by the trapezoid rule.
ErrorCoordinates error_coords(const reference::ReferenceState& ref, const Vector& theta,
                              const Vector& theta_dot, const GainSet& gains,
                              const ErrorCoordinates& previous, double dt);

/// Robust switching term: exact sign (sign(0) = 0) when eps = 0, otherwise the
/// boundary-layer saturation s / max(|s|, eps).
double robust_sign(double s, double eps);

/// Backstepping impedance torque. Per joint the bracket
///   xi1 + k1 (2l-1) xi2 |xi1|^(2(l-1)) + k2 sigpow(s, 2l-1) + tau_hat + sgn(s) psi_hat
/// is scaled by the nominal inertia (matrix product for a full D_hat).
Vector rabic_torque(const GainSet& gains, const ErrorCoordinates& coords, const Vector& tau_hat,
                    const Vector& psi_hat);

/// kp .* (theta_d - theta) + kd .* (theta_d_dot - theta_dot).
Vector pd_torque(const PdGains& pd, const Vector& theta_d, const Vector& theta_d_dot,
                 const Vector& theta, const Vector& theta_dot);

/// Per-joint Lyapunov function
///   V = xi1^2/2 + s^2/2 + (|phi_tilde|^2 / rho_phi + psi_tilde^2 / rho_psi) / 2
double lyapunov_value(double xi1, double s, const Vector& phi_tilde, double psi_tilde,
                      const estimator::AdaptationRates& rates);

struct StabilityEntry {
  double rho = 0.0;  // decay rate in V' + rho V^l <= c
  double c = 0.0;    // residual constant
  double l = 0.0;
};

/// rho = min{2 k1, 2 k2, sigma_phi, sigma_psi} and the residual c for one joint,
/// given the true Taylor coefficients and remainder bound.
StabilityEntry stability_constants(const GainSet& gains, const estimator::EstimatorConfig& cfg,
                                   const Vector& phi_true, double psi_true, int joint);

/// Radius (c / rho)^(1/l) of the residual set V <= radius.
inline double residual_level(const StabilityEntry& entry) {
  return std::pow(entry.c / entry.rho, 1.0 / entry.l);
}

}  // namespace rabic::control
