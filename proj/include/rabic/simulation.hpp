#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rabic/contact.hpp"
#include "rabic/controller.hpp"
#include "rabic/disturbance.hpp"
#include "rabic/dynamics.hpp"
#include "rabic/estimator.hpp"
#include "rabic/reference_model.hpp"

namespace rabic::sim {

using numerics::Vector;

enum class ControllerKind { kPd, kRabic };

const char* to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

struct RabicConfig {
  control::GainSet gains;
  reference::ImpedanceParams impedance;
  estimator::EstimatorConfig estimator;
};

/// Both gain sets may be present; `kind` selects the one that runs.
struct ControllerConfig {
  ControllerKind kind = ControllerKind::kRabic;
  std::optional<control::PdGains> pd;
  std::optional<RabicConfig> rabic;
};

struct ScenarioConfig {
  std::string name = "scenario";
  dynamics::RobotParams robot;
  std::optional<dynamics::ContactModel> contact;
  reference::TrajectorySpec trajectory;
  ControllerConfig controller;
  dynamics::DisturbanceSpec disturbance;
  double duration = 1.0;  // s
  double dt = 1e-3;       // s
  Vector initial_theta;      // empty = desired position at t = 0
  Vector initial_theta_dot;  // empty = desired velocity at t = 0
  dynamics::Vector2 initial_base_position = dynamics::Vector2::Zero();  // m
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  int dofs() const;
};

/// One logged sample. Vectors have one entry per joint.
struct LogRow {
  double t = 0.0;
  Vector theta, theta_dot, theta_d, theta_r, tau_r;
  dynamics::Wrench f_e = dynamics::Wrench::Zero();
  Vector s, xi1, xi2, phi_norm, psi_hat;
  Vector lyapunov;  // empty unless the run has ground truth
};

/// Fixed-rate record of a closed-loop run.
struct SimLog {
  int dofs = 0;
  double dt = 0.0;
  bool has_lyapunov = false;
  std::string config_hash;
  std::string geometry_hash;
  std::vector<LogRow> rows;

  /// Column names in file order.
  std::vector<std::string> columns() const;
  /// Row flattened in column order.
  std::vector<double> flatten(const LogRow& row) const;
};

/// Divergence or numeric failure inside run_scenario. Carries the log up to the
/// last valid step.
class RunAborted : public NumericError {
 public:
  RunAborted(const std::string& what, double t, SimLog partial)
      : NumericError(what, t), partial_(std::move(partial)) {}
  const SimLog& partial_log() const { return partial_; }

 private:
  SimLog partial_;
};

inline constexpr double kBlowUpThreshold = 1e9;

/// Runs the closed loop at the configured fixed step. Deterministic for a given
/// configuration and seed.
SimLog run_scenario(const ScenarioConfig& cfg);

struct Metrics {
  double peak_contact_force = 0.0;           // N
  double terminal_mean_contact_force = 0.0;  // N, last 20% of rows
  double inner_rmse = 0.0;                   // rad, RMS of |theta_r - theta|
  double outer_rmse = 0.0;                   // rad, RMS of |theta_d - theta|
  double rms_torque_rate = 0.0;              // N m/s, over steps and joints
  double max_abs_torque = 0.0;               // N m
  double final_second_force_slope = 0.0;     // N/s, least-squares over the last second
  bool final_second_force_decreasing = false;
};

/// Fraction of the mean force that a fitted drop over the final second must
/// exceed for the trace to count as decreasing.
inline constexpr double kDecreasingDropFraction = 0.05;
inline constexpr double kTerminalWindowFraction = 0.2;

/// Throws DomainError for logs with fewer than two rows.
Metrics compute_metrics(const SimLog& log);

struct MetricRatio {
  std::string name;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> ratio;  // b / a; empty when not applicable
};

struct ForceSample {
  double t = 0.0;
  double force_a = 0.0;
  double force_b = 0.0;
  std::optional<double> ratio;
};

struct Comparison {
  std::string label_a;
  std::string label_b;
  Metrics metrics_a;
  Metrics metrics_b;
  std::vector<MetricRatio> ratios;
  std::vector<ForceSample> force_profile;
  std::optional<double> terminal_force_ratio;
  bool b_attenuates = false;  // terminal ratio < kAttenuationThreshold
  bool a_final_second_decreasing = false;
  bool b_final_second_decreasing = false;
};

inline constexpr double kAttenuationThreshold = 0.25;
/// Forces below this (N) count as no contact when forming ratios.
inline constexpr double kContactForceFloor = 1e-9;

/// Side-by-side comparison of two runs of the same geometry (b relative to a).
/// Throws ContractError on a geometry hash mismatch.
Comparison compare_runs(const SimLog& log_a, const SimLog& log_b, std::string label_a = "a",
                        std::string label_b = "b");

}  // namespace rabic::sim
