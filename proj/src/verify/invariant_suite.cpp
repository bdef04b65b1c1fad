#include <chrono>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rabic/verify.hpp"

namespace rabic::verify {
namespace {

std::string vec_text(const Vector& v) {
  return fmt::format("[{}]", fmt::join(v.data(), v.data() + v.size(), ", "));
}

// Young inequality with the first right-hand term negated.
bool faulty_young(double q1, double q2, double a, double b, double p) {
  const long double lhs = std::pow(std::abs(static_cast<long double>(q1)), a) *
                          std::pow(std::abs(static_cast<long double>(q2)), b);
  const long double rhs =
      -(a / (a + b)) * p * std::pow(std::abs(static_cast<long double>(q1)), a + b) +
      (b / (a + b)) * std::pow(static_cast<long double>(p), -a / b) *
          std::pow(std::abs(static_cast<long double>(q2)), a + b);
  return lhs <= rhs + numerics::kInequalitySlack;
}

CheckResult lemma1_sweep(std::mt19937_64& rng, int samples, bool inject) {
  std::uniform_real_distribution<double> pos(1e-6, 3.0);
  std::uniform_real_distribution<double> q(-10.0, 10.0);
  CheckResult r{"lemma1_young_sweep", true, ""};
  int violations = 0;
  for (int i = 0; i < samples; ++i) {
    const double q1 = q(rng), q2 = q(rng), a = pos(rng), b = pos(rng), p = pos(rng);
    const bool ok = inject ? faulty_young(q1, q2, a, b, p)
                           : numerics::check_young_inequality(q1, q2, a, b, p);
    if (!ok && violations++ == 0) {
      r.detail = fmt::format("counterexample q1={} q2={} a={} b={} p={}", q1, q2, a, b, p);
    }
  }
  r.passed = violations == 0;
  if (r.passed) {
    r.detail = fmt::format("{} samples, 0 violations", samples);
  } else {
    r.detail = fmt::format("{} violations of {}; first {}", violations, samples, r.detail);
  }
  return r;
}

CheckResult lemma2_sweep(std::mt19937_64& rng, int samples) {
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::uniform_real_distribution<double> order(1e-6, 1.0 - 1e-6);
  std::uniform_int_distribution<int> length(1, 8);
  CheckResult r{"lemma2_subadditivity_sweep", true, ""};
  int violations = 0;
  std::vector<double> values;
  for (int i = 0; i < samples; ++i) {
    values.resize(static_cast<std::size_t>(length(rng)));
    for (double& v : values) v = value(rng);
    const double l = order(rng);
    if (!numerics::check_power_subadditivity(values, l) && violations++ == 0) {
      r.detail = fmt::format("counterexample values=[{}] l={}", fmt::join(values, ", "), l);
    }
  }
  r.passed = violations == 0;
  r.detail = r.passed ? fmt::format("{} samples, 0 violations", samples)
                      : fmt::format("{} violations; first {}", violations, r.detail);
  return r;
}

CheckResult signed_pow_odd(std::mt19937_64& rng, int samples) {
  std::uniform_real_distribution<double> x(-100.0, 100.0);
  std::uniform_real_distribution<double> q(1e-3, 2.0);
  CheckResult r{"signed_pow_odd", true, fmt::format("{} samples", samples)};
  for (int i = 0; i < samples; ++i) {
    const double xv = x(rng);
    const numerics::PowerExponent e(q(rng));
    if (numerics::signed_pow(-xv, e) != -numerics::signed_pow(xv, e)) {
      r.passed = false;
      r.detail = fmt::format("counterexample x={} q={}", xv, e.value());
      break;
    }
  }
  return r;
}

CheckResult rk4_accuracy() {
  CheckResult r{"rk4_exponential_accuracy", true, ""};
  double worst_small = 0.0, worst_ratio = 0.0;
  for (int i = -100; i <= 100; ++i) {
    const double z = 0.001 * i;  // lambda dt
    if (z == 0.0) continue;
    auto f = [z](double, const Vector& x) { return Vector(z * x); };
    const double got = numerics::rk4_step(f, Vector::Ones(1), 0.0, 1.0)(0);
    const double rel = std::abs(got - std::exp(z)) / std::exp(z);
    // Lagrange remainder of the degree-4 Taylor polynomial, relative to e^z.
    const double bound = std::pow(std::abs(z), 5) / 120.0 * std::exp(2.0 * std::abs(z)) + 1e-15;
    worst_ratio = std::max(worst_ratio, rel / bound);
    if (std::abs(z) <= 0.015 + 1e-12) worst_small = std::max(worst_small, rel);
  }
  r.passed = worst_small < 1e-9 && worst_ratio <= 1.0;
  r.detail = fmt::format("max rel error {:.3g} for |z|<=0.015, max error/bound {:.3g}",
                         worst_small, worst_ratio);
  return r;
}

CheckResult dynamics_oracle(std::uint64_t seed, int samples) {
  CheckResult r{"dynamics_lagrangian_oracle", true, ""};
  double worst = 0.0;
  for (int links : {2, 3}) {
    for (bool base : {false, true}) {
      const dynamics::RobotModel model(test_robot(links, base));
      const OracleReport rep = compare_with_oracle(model, samples, seed + links + (base ? 10 : 0));
      const double e = std::max({rep.worst_D, rep.worst_C, rep.worst_G, rep.worst_J});
      worst = std::max(worst, e);
      if (e >= 1e-6 && r.passed) {
        r.passed = false;
        r.detail = fmt::format("{} links base={} rel error {:.3g} at theta={} theta_dot={}", links,
                               base, e, vec_text(rep.worst_theta), vec_text(rep.worst_theta_dot));
      }
    }
  }
  if (r.passed) r.detail = fmt::format("4 models x {} states, worst rel error {:.3g}", samples, worst);
  return r;
}

CheckResult dynamics_structure(std::uint64_t seed, int samples) {
  CheckResult r{"dynamics_spd_and_skew_symmetry", true, ""};
  double min_eig = std::numeric_limits<double>::infinity(), skew = 0.0;
  for (int links : {2, 3}) {
    for (bool base : {false, true}) {
      const dynamics::RobotModel model(test_robot(links, base));
      const StructureReport rep = check_structure(model, samples, seed + links);
      min_eig = std::min(min_eig, rep.min_eigenvalue);
      skew = std::max(skew, rep.max_skew_residual);
      if (rep.max_asymmetry != 0.0) r.passed = false;
    }
  }
  r.passed = r.passed && min_eig > 0.0 && skew < 1e-4;
  r.detail = fmt::format("min eigenvalue {:.3g}, max |v'(Ddot-2C)v| {:.3g}", min_eig, skew);
  return r;
}

CheckResult energy_conservation(double duration) {
  dynamics::RobotParams p = test_robot(2, false);
  p.in_plane_gravity = false;
  const dynamics::RobotModel model(p);
  const EnergyReport rep =
      passive_energy_drift(model, Vector::Constant(2, 0.3), (Vector(2) << 1.5, -2.0).finished(),
                           duration, 1e-3);
  CheckResult r{"passive_energy_conservation", rep.max_relative_drift < 1e-5, ""};
  r.detail = fmt::format("{} s swing, max relative drift {:.3g}", duration, rep.max_relative_drift);
  return r;
}

CheckResult reference_statics() {
  const dynamics::RobotModel model(test_robot(2, false));
  const Vector theta = (Vector(2) << 0.4, -0.7).finished();
  const Matrix J = dynamics::end_effector_jacobian(model, theta);
  reference::ImpedanceParams imp{Vector::Ones(2), Vector::Constant(2, 20.0), Vector::Ones(2),
                                 (Vector(2) << 0.3, -0.2).finished()};
  dynamics::Wrench f = dynamics::Wrench::Zero();
  f << 2.0, -1.0, 0, 0, 0, 0.1;
  const SettlingReport rep = settle_reference(imp, theta, f, J, 400.0, 0.01);
  CheckResult r{"reference_model_statics", rep.max_error < 1e-6, ""};
  r.detail = fmt::format("settled offset error {:.3g}", rep.max_error);
  return r;
}

CheckResult adaptation_laws(std::mt19937_64& rng) {
  CheckResult r{"adaptation_leak_and_nonnegativity", true, ""};
  const estimator::AdaptationRates rates;
  const estimator::EstimatorConfig cfg = estimator::EstimatorConfig::uniform(1, rates);
  estimator::JointEstimate est = estimator::EstimatorState::initial(cfg, Vector::Zero(1)).joints[0];
  est.phi_hat = Vector::Constant(3, 1.5);
  est.psi_hat = 2.0;
  const Vector gamma = (Vector(3) << 1.0, 0.2, -0.1).finished();
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    est = estimator::update_phi(est, gamma, 0.0, rates, dt);
    est = estimator::update_psi(est, 0.0, rates, dt);
  }
  const double decay = std::pow(1.0 - rates.sigma_phi * dt, 1000);
  const double leak_error = std::max((est.phi_hat.array() - 1.5 * decay).abs().maxCoeff(),
                                     std::abs(est.psi_hat - 2.0 * decay));
  std::uniform_real_distribution<double> drive(-50.0, 50.0);
  double min_psi = 0.0;
  estimator::JointEstimate walk = estimator::EstimatorState::initial(cfg, Vector::Zero(1)).joints[0];
  const estimator::AdaptationRates fast{50.0, 200.0, 0.1, 900.0};
  for (int k = 0; k < 10000; ++k) {
    walk = estimator::update_psi(walk, drive(rng), fast, dt);
    min_psi = std::min(min_psi, walk.psi_hat);
  }
  r.passed = leak_error < 1e-9 && min_psi >= 0.0;
  r.detail = fmt::format("leak error {:.3g}, min psi_hat {:.3g}", leak_error, min_psi);
  return r;
}

CheckResult certificate(double duration) {
  SyntheticPlantConfig cfg = SyntheticPlantConfig::standard();
  cfg.duration = duration;
  const CertificateCheck c = check_certificate(run_synthetic_plant(cfg), 1e-3);
  CheckResult r{"practical_finite_time_certificate", c.fraction_ok >= 0.999, ""};
  r.detail = fmt::format("{} of {} samples satisfy V'+rho V^l <= c + 1e-3, worst excess {:.3g} at t={}",
                         c.checked - c.violations, c.checked, c.worst_excess, c.worst_time);
  return r;
}

}  // namespace

SettlingReport settle_reference(const reference::ImpedanceParams& imp, const Vector& theta_d,
                                const dynamics::Wrench& f_e, const Matrix& J, double duration,
                                double dt) {
  const auto n = theta_d.size();
  reference::DesiredPoint des{theta_d, Vector::Zero(n), Vector::Zero(n)};
  reference::ReferenceState ref{theta_d, Vector::Zero(n)};
  const auto steps = static_cast<long>(std::llround(duration / dt));
  for (long k = 0; k < steps; ++k) {
    ref = reference::step_reference(imp, ref, des, f_e, J, dt, static_cast<double>(k) * dt);
  }
  SettlingReport out;
  out.expected = reference::steady_state_offset(imp, imp.tau_d, J.transpose() * f_e);
  out.reached = ref.theta_r - theta_d;
  out.max_error = (out.reached - out.expected).cwiseAbs().maxCoeff();
  return out;
}

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<CheckResult> results;
  results.push_back(lemma1_sweep(rng, 10000, options.inject_lemma1_sign_flip));
  results.push_back(lemma2_sweep(rng, 10000));
  results.push_back(signed_pow_odd(rng, 10000));
  results.push_back(rk4_accuracy());
  results.push_back(dynamics_oracle(options.seed, 50));
  results.push_back(dynamics_structure(options.seed, 250));
  results.push_back(energy_conservation(2.0));
  results.push_back(reference_statics());
  results.push_back(adaptation_laws(rng));
  results.push_back(certificate(5.0));
  return results;
}

}  // namespace rabic::verify
