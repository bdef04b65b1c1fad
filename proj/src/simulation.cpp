#include "rabic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "rabic/config.hpp"

namespace rabic::sim {
namespace {

using dynamics::Wrench;

struct PlantState {
  Vector theta;
  Vector theta_dot;
  dynamics::Vector2 base = dynamics::Vector2::Zero();
};

// Controller-side state carried between steps.
struct LoopState {
  reference::ReferenceState ref;
  control::ErrorCoordinates coords;
  estimator::EstimatorState est;
  std::vector<Vector> gammas;
  Vector tau_r;
};

bool exceeds(const Vector& v) {
  return !v.allFinite() || (v.size() > 0 && v.cwiseAbs().maxCoeff() > kBlowUpThreshold);
}

PlantState step_plant(const dynamics::RobotModel& model, const ScenarioConfig& cfg,
                      const PlantState& x, const Vector& tau_r, const Wrench& f_e, double t) {
  const int n = model.dofs();
  Vector packed(2 * n + 2);
  packed << x.theta, x.theta_dot, x.base;
  auto deriv = [&](double tau_t, const Vector& s) {
    const Vector theta = s.head(n);
    const Vector theta_dot = s.segment(n, n);
    const Vector tau_u = dynamics::disturbance_torque(cfg.disturbance, tau_t, n) +
                         dynamics::friction_torque(model, theta_dot);
    Vector ds(2 * n + 2);
    ds << theta_dot, dynamics::forward_dynamics(model, theta, theta_dot, tau_r, tau_u, f_e),
        dynamics::base_velocity(model, theta, theta_dot);
    return ds;
  };
  const Vector next = numerics::rk4_step(deriv, packed, t, cfg.dt);
  return {next.head(n), next.segment(n, n), next.tail<2>()};
}

}  // namespace

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::kPd ? "pd" : "rabic";
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "pd") return ControllerKind::kPd;
  if (name == "rabic") return ControllerKind::kRabic;
  throw ConfigError("controller must be 'pd' or 'rabic', got '" + name + "'");
}

int ScenarioConfig::dofs() const {
  return static_cast<int>(robot.links.size()) + (robot.base ? 2 : 0);
}

void ScenarioConfig::validate() const {
  try {
    const dynamics::RobotModel model(robot);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("robot.") + e.what());
  }
  const int n = dofs();
  if (contact) dynamics::validate(*contact);
  trajectory.validate();
  if (static_cast<int>(trajectory.joints.size()) != n) {
    throw ConfigError("trajectory.joints must have one entry per joint (" + std::to_string(n) + ")");
  }
  dynamics::validate(disturbance, n);
  if (!std::isfinite(dt) || dt <= 0.0) throw ConfigError("sim.dt must be positive");
  if (!std::isfinite(duration) || duration < dt) {
    throw ConfigError("sim.duration must be at least sim.dt");
  }
  if (initial_theta.size() != 0 && initial_theta.size() != n) {
    throw ConfigError("sim.initial_theta must have one entry per joint");
  }
  if (initial_theta_dot.size() != 0 && initial_theta_dot.size() != n) {
    throw ConfigError("sim.initial_theta_dot must have one entry per joint");
  }
  if (!initial_theta.allFinite() || !initial_theta_dot.allFinite() ||
      !initial_base_position.allFinite()) {
    throw ConfigError("sim initial state must be finite");
  }
  if (controller.kind == ControllerKind::kPd) {
    if (!controller.pd) throw ConfigError("controller.pd is required for the pd controller");
  } else if (!controller.rabic) {
    throw ConfigError("controller.rabic is required for the rabic controller");
  }
  if (controller.pd) controller.pd->validate(n);
  if (controller.rabic) {
    controller.rabic->gains.validate(n);
    controller.rabic->impedance.validate();
    if (controller.rabic->impedance.size() != n) {
      throw ConfigError("impedance parameters must have one entry per joint");
    }
    controller.rabic->estimator.validate(n);
  }
}

std::vector<std::string> SimLog::columns() const {
  std::vector<std::string> cols{"t"};
  auto per_joint = [&](const std::string& stem) {
    for (int i = 1; i <= dofs; ++i) cols.push_back(stem + "_" + std::to_string(i));
  };
  per_joint("theta");
  per_joint("theta_dot");
  per_joint("theta_d");
  per_joint("theta_r");
  per_joint("tau_r");
  for (const char* c : {"fe_fx", "fe_fy", "fe_fz", "fe_tx", "fe_ty", "fe_tz"}) cols.emplace_back(c);
  per_joint("s");
  per_joint("xi1");
  per_joint("xi2");
  per_joint("phi_norm");
  per_joint("psi_hat");
  if (has_lyapunov) per_joint("V");
  return cols;
}

std::vector<double> SimLog::flatten(const LogRow& row) const {
  std::vector<double> out{row.t};
  auto append = [&](const Vector& v) { out.insert(out.end(), v.data(), v.data() + v.size()); };
  append(row.theta);
  append(row.theta_dot);
  append(row.theta_d);
  append(row.theta_r);
  append(row.tau_r);
  out.insert(out.end(), row.f_e.data(), row.f_e.data() + 6);
  append(row.s);
  append(row.xi1);
  append(row.xi2);
  append(row.phi_norm);
  append(row.psi_hat);
  if (has_lyapunov) append(row.lyapunov);
  return out;
}

SimLog run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const dynamics::RobotModel model(cfg.robot);
  const int n = model.dofs();
  const double dt = cfg.dt;
  const auto steps = static_cast<long>(std::llround(cfg.duration / dt));
  const bool rabic = cfg.controller.kind == ControllerKind::kRabic;

  SimLog log;
  log.dofs = n;
  log.dt = dt;
  log.config_hash = config::config_hash(cfg);
  log.geometry_hash = config::geometry_hash(cfg);
  log.rows.reserve(static_cast<std::size_t>(steps + 1));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  dynamics::ObstacleState obstacle;

  reference::DesiredPoint des = reference::desired_point(cfg.trajectory, 0.0);
  PlantState plant{cfg.initial_theta.size() ? cfg.initial_theta : des.theta,
                   cfg.initial_theta_dot.size() ? cfg.initial_theta_dot : des.theta_dot,
                   cfg.initial_base_position};

  auto sense_contact = [&](const PlantState& x) -> Wrench {
    if (!cfg.contact) return Wrench::Zero();
    const auto ee = dynamics::end_effector_state(model, x.theta, x.theta_dot, x.base);
    return dynamics::contact_wrench(*cfg.contact, obstacle, ee.pose, ee.velocity);
  };
  auto measured = [&](const Wrench& f) {
    Wrench m = f;
    if (cfg.disturbance.wrench_noise_std > 0.0) {
      for (int i = 0; i < 2; ++i) m(i) += cfg.disturbance.wrench_noise_std * noise(rng);
    }
    return m;
  };

  LoopState loop;
  const Vector zeros = Vector::Zero(n);

  // Computes the torque for the current plant state and fills the loop state.
  auto control = [&](bool first) {
    if (!rabic) {
      loop.tau_r = control::pd_torque(*cfg.controller.pd, des.theta, des.theta_dot, plant.theta,
                                      plant.theta_dot);
      return;
    }
    const RabicConfig& rc = *cfg.controller.rabic;
    if (first) {
      loop.coords = control::initial_error_coords(loop.ref, plant.theta, plant.theta_dot, rc.gains);
      loop.est = estimator::EstimatorState::initial(rc.estimator, loop.coords.xi2);
    } else {
      loop.coords = control::error_coords(loop.ref, plant.theta, plant.theta_dot, rc.gains,
                                          loop.coords, dt);
      for (int i = 0; i < n; ++i) {
        loop.est.joints[i] = estimator::advance_integral(loop.est.joints[i], loop.coords.xi2(i), dt);
      }
    }
    Vector tau_hat(n), psi_hat(n);
    loop.gammas.resize(n);
    for (int i = 0; i < n; ++i) {
      loop.gammas[i] = estimator::build_regressor(loop.est.joints[i], loop.coords.xi2(i), rc.estimator);
      tau_hat(i) = estimator::predict_uncertainty(loop.gammas[i], loop.est.joints[i].phi_hat);
      psi_hat(i) = loop.est.joints[i].psi_hat;
    }
    loop.tau_r = control::rabic_torque(rc.gains, loop.coords, tau_hat, psi_hat);
  };

  auto record = [&](double t, const Wrench& f_e) {
    LogRow row;
    row.t = t;
    row.theta = plant.theta;
    row.theta_dot = plant.theta_dot;
    row.theta_d = des.theta;
    row.tau_r = loop.tau_r;
    row.f_e = f_e;
    if (rabic) {
      row.theta_r = loop.ref.theta_r;
      row.s = loop.coords.s;
      row.xi1 = loop.coords.xi1;
      row.xi2 = loop.coords.xi2;
      row.phi_norm.resize(n);
      row.psi_hat.resize(n);
      for (int i = 0; i < n; ++i) {
        row.phi_norm(i) = loop.est.joints[i].phi_hat.norm();
        row.psi_hat(i) = loop.est.joints[i].psi_hat;
      }
    } else {
      row.theta_r = des.theta;
      row.s = row.xi1 = row.xi2 = row.phi_norm = row.psi_hat = zeros;
    }
    if (exceeds(row.theta) || exceeds(row.theta_dot) || exceeds(row.theta_r) ||
        exceeds(row.tau_r) || exceeds(row.s) || exceeds(row.phi_norm)) {
      throw RunAborted(fmt::format("state diverged beyond {:g}", kBlowUpThreshold), t, log);
    }
    log.rows.push_back(std::move(row));
  };

  double t = 0.0;
  try {
    Wrench f_e = sense_contact(plant);
    Wrench f_meas = measured(f_e);
    if (rabic) loop.ref = {des.theta, des.theta_dot};
    control(true);
    record(t, f_e);

    for (long k = 0; k < steps; ++k) {
      const numerics::Matrix J = dynamics::end_effector_jacobian(model, plant.theta);
      const PlantState next = step_plant(model, cfg, plant, loop.tau_r, f_e, t);
      if (cfg.contact) {
        obstacle = dynamics::step_obstacle(*cfg.contact, obstacle, f_e, cfg.robot.gravity, dt);
      }
      if (rabic) {
        const RabicConfig& rc = *cfg.controller.rabic;
        for (int i = 0; i < n; ++i) {
          const auto rates = rc.estimator.rates(i);
          auto& joint = loop.est.joints[i];
          joint = estimator::update_phi(joint, loop.gammas[i], loop.coords.s(i), rates, dt);
          joint = estimator::update_psi(joint, loop.coords.s(i), rates, dt);
        }
        loop.ref = reference::step_reference(rc.impedance, loop.ref, des, f_meas, J, dt, t);
      }
      plant = next;
      t = static_cast<double>(k + 1) * dt;
      des = reference::desired_point(cfg.trajectory, t);
      f_e = sense_contact(plant);
      f_meas = measured(f_e);
      control(false);
      record(t, f_e);
    }
  } catch (const RunAborted&) {
    throw;
  } catch (const NumericError& err) {
    throw RunAborted(err.what(), t, log);
  }
  return log;
}

Metrics compute_metrics(const SimLog& log) {
  const std::size_t rows = log.rows.size();
  if (rows < 2) throw DomainError("compute_metrics: torque rate undefined for fewer than two rows");
  Metrics m;
  const std::size_t terminal_start =
      static_cast<std::size_t>(std::floor((1.0 - kTerminalWindowFraction) * static_cast<double>(rows)));
  double terminal_sum = 0.0;
  double inner_sq = 0.0, outer_sq = 0.0, rate_sq = 0.0;
  for (std::size_t k = 0; k < rows; ++k) {
    const LogRow& row = log.rows[k];
    const double force = dynamics::force_magnitude(row.f_e);
    m.peak_contact_force = std::max(m.peak_contact_force, force);
    if (k >= terminal_start) terminal_sum += force;
    inner_sq += (row.theta_r - row.theta).squaredNorm();
    outer_sq += (row.theta_d - row.theta).squaredNorm();
    m.max_abs_torque = std::max(m.max_abs_torque, row.tau_r.cwiseAbs().maxCoeff());
    if (k > 0) {
      const double step = row.t - log.rows[k - 1].t;
      rate_sq += ((row.tau_r - log.rows[k - 1].tau_r) / step).squaredNorm();
    }
  }
  m.terminal_mean_contact_force = terminal_sum / static_cast<double>(rows - terminal_start);
  m.inner_rmse = std::sqrt(inner_sq / static_cast<double>(rows));
  m.outer_rmse = std::sqrt(outer_sq / static_cast<double>(rows));
  m.rms_torque_rate =
      std::sqrt(rate_sq / (static_cast<double>(rows - 1) * static_cast<double>(log.dofs)));

  // Least-squares trend of the contact force over the final second.
  const double t_end = log.rows.back().t;
  double st = 0.0, sf = 0.0, stt = 0.0, stf = 0.0;
  double count = 0.0;
  for (const LogRow& row : log.rows) {
    if (row.t < t_end - 1.0 - 1e-12) continue;
    const double f = dynamics::force_magnitude(row.f_e);
    st += row.t;
    sf += f;
    stt += row.t * row.t;
    stf += row.t * f;
    count += 1.0;
  }
  const double denom = count * stt - st * st;
  if (count >= 2.0 && denom > 0.0) {
    m.final_second_force_slope = (count * stf - st * sf) / denom;
    const double mean = sf / count;
    const double span = std::min(1.0, t_end - log.rows.front().t);
    m.final_second_force_decreasing =
        mean > kContactForceFloor &&
        -m.final_second_force_slope * span > kDecreasingDropFraction * mean;
  }
  return m;
}

Comparison compare_runs(const SimLog& log_a, const SimLog& log_b, std::string label_a,
                        std::string label_b) {
  if (log_a.geometry_hash != log_b.geometry_hash) {
    throw ContractError("compare_runs: logs come from different scenario geometries");
  }
  Comparison cmp;
  cmp.label_a = std::move(label_a);
  cmp.label_b = std::move(label_b);
  cmp.metrics_a = compute_metrics(log_a);
  cmp.metrics_b = compute_metrics(log_b);

  auto ratio = [](double a, double b, double floor) -> std::optional<double> {
    if (std::abs(a) <= floor) return std::nullopt;
    return b / a;
  };
  const Metrics& a = cmp.metrics_a;
  const Metrics& b = cmp.metrics_b;
  auto add = [&](const char* name, double va, double vb, double floor) {
    cmp.ratios.push_back({name, va, vb, ratio(va, vb, floor)});
  };
  add("peak_contact_force", a.peak_contact_force, b.peak_contact_force, kContactForceFloor);
  add("terminal_mean_contact_force", a.terminal_mean_contact_force,
      b.terminal_mean_contact_force, kContactForceFloor);
  add("inner_rmse", a.inner_rmse, b.inner_rmse, 0.0);
  add("outer_rmse", a.outer_rmse, b.outer_rmse, 0.0);
  add("rms_torque_rate", a.rms_torque_rate, b.rms_torque_rate, 0.0);
  add("max_abs_torque", a.max_abs_torque, b.max_abs_torque, 0.0);

  const std::size_t common = std::min(log_a.rows.size(), log_b.rows.size());
  cmp.force_profile.reserve(common);
  for (std::size_t k = 0; k < common; ++k) {
    ForceSample sample;
    sample.t = log_a.rows[k].t;
    sample.force_a = dynamics::force_magnitude(log_a.rows[k].f_e);
    sample.force_b = dynamics::force_magnitude(log_b.rows[k].f_e);
    sample.ratio = ratio(sample.force_a, sample.force_b, kContactForceFloor);
    cmp.force_profile.push_back(sample);
  }
  cmp.terminal_force_ratio =
      ratio(a.terminal_mean_contact_force, b.terminal_mean_contact_force, kContactForceFloor);
  cmp.b_attenuates = cmp.terminal_force_ratio && *cmp.terminal_force_ratio < kAttenuationThreshold;
  cmp.a_final_second_decreasing = a.final_second_force_decreasing;
  cmp.b_final_second_decreasing = b.final_second_force_decreasing;
  return cmp;
}

}  // namespace rabic::sim
