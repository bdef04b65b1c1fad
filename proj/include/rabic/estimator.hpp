#pragma once

#include <vector>

#include "rabic/numerics.hpp"

namespace rabic::estimator {

using numerics::Vector;

struct AdaptationRates {
  double rho_phi = 50.0;
  double sigma_phi = 0.005;
  double rho_psi = 0.1;
  double sigma_psi = 0.005;
};

/// Taylor orders and per-joint adaptation rates/leaks.
struct EstimatorConfig {
  int integral_order = 1;  // powers of the integral term
  int direct_order = 1;    // powers of the direct term
  Vector rho_phi;
  Vector sigma_phi;
  Vector rho_psi;
  Vector sigma_psi;

  int regressor_size() const { return integral_order + direct_order + 1; }
  AdaptationRates rates(int joint) const;
  /// Throws ConfigError on nonpositive rates or a zero-order expansion.
  void validate(int dofs) const;

  static EstimatorConfig uniform(int dofs, const AdaptationRates& rates, int integral_order = 1,
                                 int direct_order = 1);
};

/// Per-joint estimator state.
struct JointEstimate {
  Vector phi_hat;            // Taylor coefficients
  double psi_hat = 0.0;      // bound on the unmodeled remainder, kept >= 0
  double xi2_ref = 0.0;      // expansion point
  double integral = 0.0;     // running integral of (xi2 - xi2_ref)
  double last_offset = 0.0;  // xi2 - xi2_ref at the end of the integral
};

struct EstimatorState {
  std::vector<JointEstimate> joints;

  /// Zero coefficients and bounds, expansion point at the current xi2.
  static EstimatorState initial(const EstimatorConfig& cfg, const Vector& xi2_at_start);
};

/// [1, I, I^2, .., I^l1, d, d^2, .., d^l2] with I the integral accumulator and
/// d = xi2 - xi2_ref.
Vector build_regressor(const JointEstimate& state, double xi2, const EstimatorConfig& cfg);

/// gamma^T phi_hat.
double predict_uncertainty(const Vector& gamma, const Vector& phi_hat);

/// Forward-Euler step of phi_hat' = rho_phi s gamma - sigma_phi phi_hat.
JointEstimate update_phi(const JointEstimate& state, const Vector& gamma, double s,
                         const AdaptationRates& rates, double dt);

/// Forward-Euler step of psi_hat' = rho_psi |s| - sigma_psi psi_hat, clamped at 0.
JointEstimate update_psi(const JointEstimate& state, double s, const AdaptationRates& rates,
                         double dt);

/// Trapezoidal update of the integral of (xi2 - xi2_ref) over one step ending at xi2.
JointEstimate advance_integral(const JointEstimate& state, double xi2, double dt);

}  // namespace rabic::estimator
