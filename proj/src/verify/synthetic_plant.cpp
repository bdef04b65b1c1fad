#include <cmath>
#include <numbers>

#include "rabic/verify.hpp"

namespace rabic::verify {
namespace {

// True regressor from the exact integral state.
double true_uncertainty(const SyntheticPlantConfig& cfg, double integral, double offset, double t) {
  double h = cfg.phi_true(0);
  double power = 1.0;
  for (int k = 1; k <= cfg.estimator.integral_order; ++k) {
    power *= integral;
    h += cfg.phi_true(k) * power;
  }
  power = 1.0;
  for (int m = 1; m <= cfg.estimator.direct_order; ++m) {
    power *= offset;
    h += cfg.phi_true(cfg.estimator.integral_order + m) * power;
  }
  return h + cfg.vartheta_amplitude *
                 std::sin(2.0 * std::numbers::pi * cfg.vartheta_frequency_hz * t);
}

}  // namespace

SyntheticPlantConfig SyntheticPlantConfig::standard() {
  SyntheticPlantConfig cfg;
  cfg.gains.k1 = Vector::Constant(1, 5.76);
  cfg.gains.k2 = Vector::Constant(1, 7.7);
  cfg.gains.l = 0.999;
  cfg.gains.mu = Vector::Constant(1, 1.0);
  cfg.gains.D_hat = Matrix::Identity(1, 1);
  cfg.estimator = estimator::EstimatorConfig::uniform(1, estimator::AdaptationRates{});
  cfg.phi_true = Vector(3);
  cfg.phi_true << 2.0, 0.0, 3.0;
  return cfg;
}

SyntheticRun run_synthetic_plant(const SyntheticPlantConfig& cfg) {
  cfg.gains.validate(1);
  cfg.estimator.validate(1);
  if (cfg.phi_true.size() != cfg.estimator.regressor_size()) {
    throw ContractError("run_synthetic_plant: phi_true length must match the regressor");
  }
  const double dt = cfg.dt;
  const double d_hat = cfg.gains.D_hat(0, 0);
  const estimator::AdaptationRates rates = cfg.estimator.rates(0);
  const double xi2_ref = cfg.xi2_initial;

  SyntheticRun run;
  run.psi_true = std::abs(cfg.vartheta_amplitude);
  run.certificate = control::stability_constants(cfg.gains, cfg.estimator, cfg.phi_true,
                                                 run.psi_true, 0);

  Vector x(3);
  x << cfg.xi1_initial, cfg.xi2_initial, 0.0;
  estimator::JointEstimate est =
      estimator::EstimatorState::initial(cfg.estimator, Vector::Constant(1, xi2_ref)).joints[0];

  const auto steps = static_cast<long>(std::llround(cfg.duration / dt));
  run.samples.reserve(static_cast<std::size_t>(steps + 1));
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k > 0) est = estimator::advance_integral(est, x(1), dt);

    control::ErrorCoordinates coords;
    coords.xi1 = Vector::Constant(1, x(0));
    coords.xi2 = Vector::Constant(1, x(1));
    coords.s = control::surface(coords.xi1, coords.xi2, cfg.gains);
    coords.e = coords.e_dot = Vector::Zero(1);
    const Vector gamma = estimator::build_regressor(est, x(1), cfg.estimator);
    const double tau_hat = estimator::predict_uncertainty(gamma, est.phi_hat);
    const double tau = control::rabic_torque(cfg.gains, coords, Vector::Constant(1, tau_hat),
                                             Vector::Constant(1, est.psi_hat))(0);

    SyntheticSample sample;
    sample.t = t;
    sample.xi1 = x(0);
    sample.xi2 = x(1);
    sample.s = coords.s(0);
    sample.tau = tau;
    sample.tau_hat = tau_hat;
    sample.H = true_uncertainty(cfg, x(2), x(1) - xi2_ref, t);
    sample.phi_hat = est.phi_hat;
    sample.psi_hat = est.psi_hat;
    sample.V = control::lyapunov_value(x(0), coords.s(0), cfg.phi_true - est.phi_hat,
                                       run.psi_true - est.psi_hat, rates);
    run.samples.push_back(sample);
    if (k == steps) break;

    auto deriv = [&](double tau_t, const Vector& y) {
      Vector dy(3);
      dy << y(1), -tau / d_hat + true_uncertainty(cfg, y(2), y(1) - xi2_ref, tau_t),
          y(1) - xi2_ref;
      return dy;
    };
    x = numerics::rk4_step(deriv, x, t, dt);
    est = estimator::update_phi(est, gamma, coords.s(0), rates, dt);
    est = estimator::update_psi(est, coords.s(0), rates, dt);
  }
  return run;
}

CertificateCheck check_certificate(const SyntheticRun& run, double tol, double margin) {
  CertificateCheck out;
  const auto& cert = run.certificate;
  out.residual_level = control::residual_level(cert);
  const auto& s = run.samples;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double vdot = (s[k + 1].V - s[k - 1].V) / (s[k + 1].t - s[k - 1].t);
    const double excess = vdot + cert.rho * std::pow(s[k].V, cert.l) - cert.c;
    ++out.checked;
    if (excess > tol) ++out.violations;
    if (out.checked == 1 || excess > out.worst_excess) {
      out.worst_excess = excess;
      out.worst_time = s[k].t;
    }
  }
  out.fraction_ok = out.checked ? 1.0 - static_cast<double>(out.violations) / out.checked : 0.0;
  // Last exit from the residual set; the entry time follows it.
  const double bound = out.residual_level + margin;
  std::optional<std::size_t> last_outside;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].V > bound) last_outside = k;
  }
  if (!last_outside) {
    out.residual_entry = s.empty() ? 0.0 : s.front().t;
  } else if (*last_outside + 1 < s.size()) {
    out.residual_entry = s[*last_outside + 1].t;
  }
  return out;
}

}  // namespace rabic::verify
