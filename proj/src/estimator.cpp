#include "rabic/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rabic::estimator {
namespace {

void require_positive(const Vector& v, int dofs, const char* name) {
  if (v.size() != dofs) {
    throw ConfigError(std::string("estimator.") + name + " must have " + std::to_string(dofs) +
                      " entries");
  }
  for (int i = 0; i < dofs; ++i) {
    if (!std::isfinite(v(i)) || v(i) <= 0.0) {
      throw ConfigError(std::string("estimator.") + name + "[" + std::to_string(i) +
                        "] must be positive");
    }
  }
}

void require_dt(double dt) {
  if (!(dt > 0.0)) throw DomainError("estimator: dt must be positive");
}

}  // namespace

AdaptationRates EstimatorConfig::rates(int joint) const {
  return {rho_phi(joint), sigma_phi(joint), rho_psi(joint), sigma_psi(joint)};
}

void EstimatorConfig::validate(int dofs) const {
  if (integral_order < 0 || direct_order < 0) {
    throw ConfigError("estimator orders must be nonnegative");
  }
  if (integral_order + direct_order < 1) {
    throw ConfigError("estimator.integral_order + estimator.direct_order must be at least 1");
  }
  require_positive(rho_phi, dofs, "rho_phi");
  require_positive(sigma_phi, dofs, "sigma_phi");
  require_positive(rho_psi, dofs, "rho_psi");
  require_positive(sigma_psi, dofs, "sigma_psi");
}

EstimatorConfig EstimatorConfig::uniform(int dofs, const AdaptationRates& rates,
                                         int integral_order, int direct_order) {
  EstimatorConfig cfg;
  cfg.integral_order = integral_order;
  cfg.direct_order = direct_order;
  cfg.rho_phi = Vector::Constant(dofs, rates.rho_phi);
  cfg.sigma_phi = Vector::Constant(dofs, rates.sigma_phi);
  cfg.rho_psi = Vector::Constant(dofs, rates.rho_psi);
  cfg.sigma_psi = Vector::Constant(dofs, rates.sigma_psi);
  return cfg;
}

EstimatorState EstimatorState::initial(const EstimatorConfig& cfg, const Vector& xi2_at_start) {
  EstimatorState state;
  state.joints.resize(static_cast<std::size_t>(xi2_at_start.size()));
  for (Eigen::Index i = 0; i < xi2_at_start.size(); ++i) {
    JointEstimate& j = state.joints[static_cast<std::size_t>(i)];
    j.phi_hat = Vector::Zero(cfg.regressor_size());
    j.xi2_ref = xi2_at_start(i);
  }
  return state;
}

Vector build_regressor(const JointEstimate& state, double xi2, const EstimatorConfig& cfg) {
  Vector gamma(cfg.regressor_size());
  gamma(0) = 1.0;
  double power = 1.0;
  for (int k = 1; k <= cfg.integral_order; ++k) {
    power *= state.integral;
    gamma(k) = power;
  }
  const double offset = xi2 - state.xi2_ref;
  power = 1.0;
  for (int m = 1; m <= cfg.direct_order; ++m) {
    power *= offset;
    gamma(cfg.integral_order + m) = power;
  }
  return gamma;
}

double predict_uncertainty(const Vector& gamma, const Vector& phi_hat) {
  if (gamma.size() != phi_hat.size()) {
    throw ContractError("predict_uncertainty: regressor and coefficient lengths differ");
  }
  return gamma.dot(phi_hat);
}

JointEstimate update_phi(const JointEstimate& state, const Vector& gamma, double s,
                         const AdaptationRates& rates, double dt) {
  require_dt(dt);
  if (gamma.size() != state.phi_hat.size()) {
    throw ContractError("update_phi: regressor and coefficient lengths differ");
  }
  JointEstimate next = state;
  next.phi_hat = state.phi_hat + dt * (rates.rho_phi * s * gamma - rates.sigma_phi * state.phi_hat);
  if (!next.phi_hat.allFinite()) throw NumericError("update_phi: non-finite coefficients");
  return next;
}

JointEstimate update_psi(const JointEstimate& state, double s, const AdaptationRates& rates,
                         double dt) {
  require_dt(dt);
  JointEstimate next = state;
  next.psi_hat = state.psi_hat + dt * (rates.rho_psi * std::abs(s) - rates.sigma_psi * state.psi_hat);
  next.psi_hat = std::max(0.0, next.psi_hat);
  return next;
}

JointEstimate advance_integral(const JointEstimate& state, double xi2, double dt) {
  require_dt(dt);
  JointEstimate next = state;
  const double offset = xi2 - state.xi2_ref;
  next.integral = state.integral + 0.5 * dt * (state.last_offset + offset);
  next.last_offset = offset;
  return next;
}

}  // namespace rabic::estimator
