#include "rabic/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rabic::control {
namespace {

void require_sign(const Vector& v, int dofs, const std::string& name, bool allow_zero) {
  if (v.size() != dofs) {
    throw ConfigError(name + " must have " + std::to_string(dofs) + " entries");
  }
  for (int i = 0; i < dofs; ++i) {
    if (!std::isfinite(v(i)) || v(i) < 0.0 || (!allow_zero && v(i) == 0.0)) {
      throw ConfigError(name + "[" + std::to_string(i) + "] must be " +
                        (allow_zero ? "nonnegative" : "positive"));
    }
  }
}

void require_positive(const Vector& v, int dofs, const std::string& name) {
  require_sign(v, dofs, name, false);
}

void check_size(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) throw ContractError(std::string(what) + ": dimension mismatch");
}

ErrorCoordinates raw_coords(const reference::ReferenceState& ref, const Vector& theta,
                            const Vector& theta_dot, const GainSet& gains) {
  const auto n = gains.k1.size();
  check_size(ref.theta_r, n, "error_coords");
  check_size(ref.theta_r_dot, n, "error_coords");
  check_size(theta, n, "error_coords");
  check_size(theta_dot, n, "error_coords");
  ErrorCoordinates c;
  c.e = ref.theta_r - theta;
  c.e_dot = ref.theta_r_dot - theta_dot;
  c.xi2 = c.e_dot + gains.mu.cwiseProduct(c.e);
  return c;
}

}  // namespace

void GainSet::validate(int dofs) const {
  require_positive(k1, dofs, "rabic.k1");
  require_positive(k2, dofs, "rabic.k2");
  require_positive(mu, dofs, "rabic.mu");
  if (!std::isfinite(l) || l <= 0.5 || l >= 1.0) {
    throw ConfigError("rabic.l must lie in (0.5, 1), got " + std::to_string(l));
  }
  if (D_hat.rows() != dofs || D_hat.cols() != dofs) {
    throw ConfigError("rabic.D_hat must be " + std::to_string(dofs) + "x" + std::to_string(dofs));
  }
  if (!D_hat.allFinite() || !D_hat.isApprox(D_hat.transpose(), 1e-12)) {
    throw ConfigError("rabic.D_hat must be symmetric");
  }
  if (Eigen::LLT<Matrix>(D_hat).info() != Eigen::Success) {
    throw ConfigError("rabic.D_hat must be positive definite");
  }
  if (!std::isfinite(sign_smoothing_eps) || sign_smoothing_eps < 0.0) {
    throw ConfigError("rabic.sign_smoothing_eps must be nonnegative");
  }
  if (!std::isfinite(xi1_guard_eps) || xi1_guard_eps <= 0.0) {
    throw ConfigError("rabic.xi1_guard_eps must be positive");
  }
}

void PdGains::validate(int dofs) const {
  require_sign(kp, dofs, "pd.kp", true);
  require_sign(kd, dofs, "pd.kd", true);
}

Vector surface(const Vector& xi1, const Vector& xi2, const GainSet& gains) {
  const auto q = numerics::PowerExponent::from_backstepping_order(gains.l);
  Vector s(xi1.size());
  for (Eigen::Index i = 0; i < xi1.size(); ++i) {
    s(i) = xi2(i) + gains.k1(i) * numerics::signed_pow(xi1(i), q);
  }
  return s;
}

ErrorCoordinates initial_error_coords(const reference::ReferenceState& ref, const Vector& theta,
                                      const Vector& theta_dot, const GainSet& gains) {
  ErrorCoordinates c = raw_coords(ref, theta, theta_dot, gains);
  c.xi1 = Vector::Zero(c.xi2.size());
  c.s = surface(c.xi1, c.xi2, gains);
  return c;
}

ErrorCoordinates error_coords(const reference::ReferenceState& ref, const Vector& theta,
                              const Vector& theta_dot, const GainSet& gains,
                              const ErrorCoordinates& previous, double dt) {
  if (!(dt > 0.0)) throw DomainError("error_coords: dt must be positive");
  ErrorCoordinates c = raw_coords(ref, theta, theta_dot, gains);
  check_size(previous.xi1, c.xi2.size(), "error_coords");
  check_size(previous.xi2, c.xi2.size(), "error_coords");
  c.xi1 = previous.xi1 + 0.5 * dt * (previous.xi2 + c.xi2);
  c.s = surface(c.xi1, c.xi2, gains);
  return c;
}

double robust_sign(double s, double eps) {
  if (eps <= 0.0) return numerics::sign(s);
  return s / std::max(std::abs(s), eps);
}

Vector rabic_torque(const GainSet& gains, const ErrorCoordinates& coords, const Vector& tau_hat,
                    const Vector& psi_hat) {
  const auto n = gains.k1.size();
  check_size(coords.xi1, n, "rabic_torque");
  check_size(coords.xi2, n, "rabic_torque");
  check_size(coords.s, n, "rabic_torque");
  check_size(tau_hat, n, "rabic_torque");
  check_size(psi_hat, n, "rabic_torque");
  const auto q = numerics::PowerExponent::from_backstepping_order(gains.l);
  const double two_l_minus_one = 2.0 * gains.l - 1.0;

  Vector bracket(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double guarded = numerics::guarded_power_deriv(coords.xi1(i), gains.l, gains.xi1_guard_eps);
    const double backstep = coords.xi1(i) + gains.k1(i) * two_l_minus_one * coords.xi2(i) * guarded;
    const double reaching = gains.k2(i) * numerics::signed_pow(coords.s(i), q);
    const double compensation =
        tau_hat(i) + robust_sign(coords.s(i), gains.sign_smoothing_eps) * psi_hat(i);
    bracket(i) = backstep + reaching + compensation;
  }
  const bool diagonal = gains.D_hat.isDiagonal(0.0);
  Vector tau = diagonal ? Vector(gains.D_hat.diagonal().cwiseProduct(bracket))
                        : Vector(gains.D_hat * bracket);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(tau(i))) {
      throw NumericError("rabic_torque: non-finite torque", std::nullopt, static_cast<int>(i));
    }
  }
  return tau;
}

Vector pd_torque(const PdGains& pd, const Vector& theta_d, const Vector& theta_d_dot,
                 const Vector& theta, const Vector& theta_dot) {
  const auto n = pd.kp.size();
  check_size(pd.kd, n, "pd_torque");
  check_size(theta_d, n, "pd_torque");
  check_size(theta_d_dot, n, "pd_torque");
  check_size(theta, n, "pd_torque");
  check_size(theta_dot, n, "pd_torque");
  return pd.kp.cwiseProduct(theta_d - theta) + pd.kd.cwiseProduct(theta_d_dot - theta_dot);
}

double lyapunov_value(double xi1, double s, const Vector& phi_tilde, double psi_tilde,
                      const estimator::AdaptationRates& rates) {
  return 0.5 * xi1 * xi1 + 0.5 * s * s +
         0.5 * (phi_tilde.squaredNorm() / rates.rho_phi + psi_tilde * psi_tilde / rates.rho_psi);
}

StabilityEntry stability_constants(const GainSet& gains, const estimator::EstimatorConfig& cfg,
                                   const Vector& phi_true, double psi_true, int joint) {
  if (joint < 0 || joint >= gains.size()) throw ContractError("stability_constants: bad joint");
  const estimator::AdaptationRates r = cfg.rates(joint);
  const double l = gains.l;
  StabilityEntry entry;
  entry.l = l;
  entry.rho = std::min({2.0 * gains.k1(joint), 2.0 * gains.k2(joint), r.sigma_phi, r.sigma_psi});
  const double p = std::pow(l, l / (1.0 - l));
  const double phi_weight = r.sigma_phi / (2.0 * r.rho_phi);
  const double psi_weight = r.sigma_psi / (2.0 * r.rho_psi);
  entry.c = (phi_weight + psi_weight) * (1.0 - l) * p + phi_weight * phi_true.squaredNorm() +
            psi_weight * psi_true * psi_true;
  return entry;
}

}  // namespace rabic::control
