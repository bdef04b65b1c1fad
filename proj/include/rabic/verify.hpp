#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rabic/controller.hpp"
#include "rabic/dynamics.hpp"
#include "rabic/estimator.hpp"
#include "rabic/reference_model.hpp"

namespace rabic::verify {

using numerics::Matrix;
using numerics::Vector;

// ---- Lagrangian oracle ----
//
// Rebuilds the equations of motion from scratch: kinetic energy by propagating
// link velocities outward, D by polarization of T, dD/dtheta and G by central
// differences, C from the Christoffel symbols of the differenced D. Evaluated
// in long double and shares no code with the closed-form model.

struct OracleTerms {
  Matrix D;
  Matrix C;
  Vector G;
  Matrix J;  // 6 x n, from the velocity propagation with unit joint rates
};

double oracle_kinetic_energy(const dynamics::RobotModel& model, const Vector& theta,
                             const Vector& theta_dot);
double oracle_potential_energy(const dynamics::RobotModel& model, const Vector& theta);
OracleTerms lagrangian_oracle(const dynamics::RobotModel& model, const Vector& theta,
                              const Vector& theta_dot);
/// D theta_ddot = tau - C theta_dot - G - J^T f_e solved with the oracle terms.
Vector oracle_forward_dynamics(const dynamics::RobotModel& model, const Vector& theta,
                               const Vector& theta_dot, const Vector& tau,
                               const dynamics::Wrench& f_e);

/// max |a - b| / max(max |b|, floor).
double relative_error(const Matrix& a, const Matrix& b, double floor = 1e-9);

/// Test robots: 1..3 links, optional base. Fixed-base arms use in-plane gravity.
dynamics::RobotParams test_robot(int links, bool with_base);
/// Uniform random joint angles in [-pi, pi] and rates in [-2, 2].
void random_state(std::mt19937_64& rng, int dofs, Vector& theta, Vector& theta_dot);

struct OracleReport {
  int samples = 0;
  double worst_D = 0.0;
  double worst_C = 0.0;
  double worst_G = 0.0;
  double worst_J = 0.0;
  Vector worst_theta;  // state with the largest error
  Vector worst_theta_dot;
};

/// Compares compute_terms with the oracle on random states.
OracleReport compare_with_oracle(const dynamics::RobotModel& model, int samples,
                                 std::uint64_t seed);

struct StructureReport {
  int samples = 0;
  double min_eigenvalue = 0.0;     // smallest eigenvalue of D seen
  double max_asymmetry = 0.0;      // max |D - D^T|
  double max_skew_residual = 0.0;  // max |v^T (Ddot - 2C) v|
};

/// SPD and skew-symmetry checks, with Ddot from central differences along theta_dot.
StructureReport check_structure(const dynamics::RobotModel& model, int samples,
                                std::uint64_t seed, double h = 1e-6);

struct EnergyReport {
  double initial = 0.0;
  double final = 0.0;
  double max_relative_drift = 0.0;
};

/// Passive swing with zero torque and no friction, integrated with RK4.
EnergyReport passive_energy_drift(const dynamics::RobotModel& model, const Vector& theta0,
                                  const Vector& theta_dot0, double duration, double dt);

// ---- reference model statics ----

struct SettlingReport {
  Vector expected;  // K_r^{-1} (tau_d - J^T f_e)
  Vector reached;   // theta_r - theta_d at the end of the run
  double max_error = 0.0;
};

/// Integrates the impedance model from rest at a constant desired point under a
/// constant wrench and compares the settled offset with the closed form.
SettlingReport settle_reference(const reference::ImpedanceParams& imp, const Vector& theta_d,
                                const dynamics::Wrench& f_e, const Matrix& J, double duration,
                                double dt);

// ---- Synthetic scalar plant ----
//
// The error system xi1' = xi2, xi2' = -tau / D_hat + H with H = gamma^T phi +
// vartheta exactly, where gamma is the true regressor (continuous integral) and
// phi is known. The controller sees xi1 and xi2 directly.

struct SyntheticPlantConfig {
  control::GainSet gains;               // one joint
  estimator::EstimatorConfig estimator;  // one joint
  Vector phi_true;
  double vartheta_amplitude = 0.0;  // sinusoidal remainder, |vartheta| <= amplitude
  double vartheta_frequency_hz = 0.5;
  double xi1_initial = 0.0;
  double xi2_initial = 0.5;
  double duration = 10.0;
  double dt = 1e-3;

  /// Default scalar setup: k1 = 5.76, k2 = 7.7, l = 0.999, D_hat = 1,
  /// rho_phi = 50, rho_psi = 0.1, sigma = 0.005, H = 2 + 3 (xi2 - xi2_0).
  static SyntheticPlantConfig standard();
};

struct SyntheticSample {
  double t = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double s = 0.0;
  double tau = 0.0;
  double tau_hat = 0.0;
  double H = 0.0;
  Vector phi_hat;
  double psi_hat = 0.0;
  double V = 0.0;
};

struct SyntheticRun {
  std::vector<SyntheticSample> samples;
  control::StabilityEntry certificate;
  double psi_true = 0.0;
};

SyntheticRun run_synthetic_plant(const SyntheticPlantConfig& cfg);

struct CertificateCheck {
  int checked = 0;
  int violations = 0;
  double worst_excess = 0.0;  // max of V' + rho V^l - c
  double worst_time = 0.0;
  double fraction_ok = 0.0;
  double residual_level = 0.0;             // (c / rho)^(1/l)
  std::optional<double> residual_entry;    // first time V stays within level + margin
};

/// Central-difference V' at interior samples against V' + rho V^l <= c + tol.
CertificateCheck check_certificate(const SyntheticRun& run, double tol, double margin = 0.0);

// ---- invariant suite ----

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // summary, or the counterexample on failure
};

struct SuiteOptions {
  std::uint64_t seed = 12345;
  /// Flip the sign of the first right-hand term of the Young inequality, to
  /// confirm that the suite reports a counterexample.
  bool inject_lemma1_sign_flip = false;
};

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options);

}  // namespace rabic::verify
