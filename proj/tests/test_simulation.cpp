#include <cmath>

#include <gtest/gtest.h>

#include "rabic/config.hpp"
#include "rabic/io.hpp"
#include "rabic/simulation.hpp"

namespace rabic::sim {
namespace {

ScenarioConfig short_run(const std::string& preset, double duration) {
  ScenarioConfig cfg = config::load_scenario(preset);
  cfg.duration = duration;
  return cfg;
}

// Log with a prescribed contact force trace on a 1-joint skeleton.
SimLog force_log(const std::vector<double>& t, const std::vector<double>& force) {
  SimLog log;
  log.dofs = 1;
  log.dt = t.size() > 1 ? t[1] - t[0] : 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    LogRow row;
    row.t = t[k];
    row.theta = row.theta_dot = row.theta_d = row.theta_r = row.tau_r = Vector::Zero(1);
    row.s = row.xi1 = row.xi2 = row.phi_norm = row.psi_hat = Vector::Zero(1);
    row.f_e(0) = force[k];
    log.rows.push_back(row);
  }
  return log;
}

TEST(ControllerKind, RoundTrip) {
  EXPECT_EQ(controller_kind_from_string("pd"), ControllerKind::kPd);
  EXPECT_EQ(controller_kind_from_string(to_string(ControllerKind::kRabic)), ControllerKind::kRabic);
  EXPECT_THROW(controller_kind_from_string("lqr"), ConfigError);
}

TEST(RunScenario, SingleStepWithZeroGains) {
  ScenarioConfig cfg = short_run("nominal-3link", 1e-3);
  cfg.controller.kind = ControllerKind::kPd;
  cfg.controller.pd->kp.setZero();
  cfg.controller.pd->kd.setZero();
  const SimLog log = run_scenario(cfg);
  ASSERT_EQ(log.rows.size(), 2u);
  EXPECT_EQ(log.rows[0].t, 0.0);
  EXPECT_DOUBLE_EQ(log.rows[1].t, 1e-3);
  EXPECT_EQ(log.rows[1].tau_r, Vector::Zero(3));
}

TEST(RunScenario, DeterministicLog) {
  for (ControllerKind kind : {ControllerKind::kPd, ControllerKind::kRabic}) {
    ScenarioConfig cfg = short_run("d-analog", 0.5);
    cfg.controller.kind = kind;
    cfg.disturbance.wrench_noise_std = 0.5;
    cfg.seed = 9;
    EXPECT_EQ(io::log_csv(run_scenario(cfg)), io::log_csv(run_scenario(cfg)));
  }
}

TEST(RunScenario, SeedChangesNoisyRun) {
  ScenarioConfig cfg = short_run("d-analog", 0.2);
  cfg.disturbance.wrench_noise_std = 0.5;
  const std::string a = io::log_csv(run_scenario(cfg));
  cfg.seed += 1;
  EXPECT_NE(a, io::log_csv(run_scenario(cfg)));
}

TEST(RunScenario, TimeStrictlyIncreasingAndRowsComplete) {
  const ScenarioConfig cfg = short_run("b-analog", 0.3);
  const SimLog log = run_scenario(cfg);
  EXPECT_EQ(log.dofs, 5);
  EXPECT_EQ(log.config_hash, config::config_hash(cfg));
  EXPECT_EQ(log.geometry_hash, config::geometry_hash(cfg));
  const std::size_t columns = log.columns().size();
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    EXPECT_EQ(log.flatten(log.rows[k]).size(), columns);
    if (k > 0) ASSERT_GT(log.rows[k].t, log.rows[k - 1].t);
  }
  EXPECT_NEAR(log.rows.back().t, 0.3, 1e-12);
}

TEST(RunScenario, StartsOnDesiredTrajectory) {
  const ScenarioConfig cfg = short_run("nominal-3link", 0.01);
  const SimLog log = run_scenario(cfg);
  EXPECT_EQ(log.rows[0].theta, log.rows[0].theta_d);
  EXPECT_EQ(log.rows[0].theta_r, log.rows[0].theta_d);
}

TEST(RunScenario, UnstableGainsAbortWithPartialLog) {
  ScenarioConfig cfg = short_run("nominal-3link", 2.0);
  cfg.controller.kind = ControllerKind::kPd;
  cfg.controller.pd->kp.setConstant(1e6);
  cfg.controller.pd->kd.setConstant(1e6);
  cfg.initial_theta = Vector::Constant(3, 0.5);
  try {
    run_scenario(cfg);
    FAIL() << "expected RunAborted";
  } catch (const RunAborted& e) {
    const SimLog& partial = e.partial_log();
    EXPECT_GT(partial.rows.size(), 0u);
    EXPECT_LT(partial.rows.size(), 2001u);
    for (const LogRow& row : partial.rows) {
      for (double v : partial.flatten(row)) ASSERT_TRUE(std::isfinite(v));
    }
    ASSERT_TRUE(e.time().has_value());
  }
}

TEST(ScenarioConfig, Validation) {
  ScenarioConfig cfg = config::load_scenario("nominal-3link");
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.dofs(), 3);
  ScenarioConfig bad = cfg;
  bad.dt = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.duration = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.initial_theta = Vector::Zero(2);
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.controller.kind = ControllerKind::kPd;
  bad.controller.pd.reset();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.robot.links[1].mass = -2.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Metrics, ConstantTorqueHasZeroRate) {
  SimLog log = force_log({0.0, 0.1, 0.2, 0.3}, {0.0, 0.0, 0.0, 0.0});
  for (LogRow& row : log.rows) row.tau_r(0) = 3.0;
  const Metrics m = compute_metrics(log);
  EXPECT_EQ(m.rms_torque_rate, 0.0);
  EXPECT_EQ(m.max_abs_torque, 3.0);
  EXPECT_EQ(m.peak_contact_force, 0.0);
  EXPECT_FALSE(m.final_second_force_decreasing);
}

TEST(Metrics, RampTorqueRate) {
  // tau = a t on n joints: every joint moves at rate a, so the RMS over joints is a.
  const double a = 2.5;
  SimLog log;
  log.dofs = 4;
  for (int k = 0; k <= 10; ++k) {
    LogRow row;
    row.t = 0.01 * k;
    row.theta = row.theta_dot = row.theta_d = row.theta_r = Vector::Zero(4);
    row.tau_r = Vector::Constant(4, a * row.t);
    log.rows.push_back(row);
  }
  EXPECT_NEAR(compute_metrics(log).rms_torque_rate, a, 1e-12);
  // Only one joint ramping spreads the rate over all four: a / sqrt(4).
  for (LogRow& row : log.rows) row.tau_r.tail(3).setZero();
  EXPECT_NEAR(compute_metrics(log).rms_torque_rate, a / 2.0, 1e-12);
}

TEST(Metrics, TrackingErrors) {
  SimLog log = force_log({0.0, 0.1}, {0.0, 0.0});
  for (LogRow& row : log.rows) {
    row.theta_r(0) = 0.3;
    row.theta_d(0) = -0.4;
  }
  const Metrics m = compute_metrics(log);
  EXPECT_DOUBLE_EQ(m.inner_rmse, 0.3);
  EXPECT_DOUBLE_EQ(m.outer_rmse, 0.4);
}

TEST(Metrics, NeedsTwoRows) {
  EXPECT_THROW(compute_metrics(force_log({0.0}, {1.0})), DomainError);
}

TEST(Metrics, TerminalWindowAndTrend) {
  std::vector<double> t, falling, flat;
  for (int k = 0; k <= 300; ++k) {
    t.push_back(0.01 * k);
    falling.push_back(10.0 - 2.0 * t.back());
    flat.push_back(5.0);
  }
  const Metrics f = compute_metrics(force_log(t, falling));
  EXPECT_TRUE(f.final_second_force_decreasing);
  EXPECT_NEAR(f.final_second_force_slope, -2.0, 1e-9);
  EXPECT_DOUBLE_EQ(f.peak_contact_force, 10.0);
  // Last 20% of 301 rows starts at row 240: forces 10 - 2 t for t in [2.40, 3.00].
  EXPECT_NEAR(f.terminal_mean_contact_force, 10.0 - 2.0 * 2.705, 0.02);

  const Metrics g = compute_metrics(force_log(t, flat));
  EXPECT_FALSE(g.final_second_force_decreasing);
  EXPECT_NEAR(g.final_second_force_slope, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(g.terminal_mean_contact_force, 5.0);
}

TEST(CompareRuns, SelfComparison) {
  ScenarioConfig cfg = short_run("d-analog", 16.0);
  const SimLog log = run_scenario(cfg);
  const Comparison cmp = compare_runs(log, log);
  ASSERT_TRUE(cmp.terminal_force_ratio.has_value());
  EXPECT_DOUBLE_EQ(*cmp.terminal_force_ratio, 1.0);
  for (const MetricRatio& r : cmp.ratios) {
    if (r.ratio) EXPECT_DOUBLE_EQ(*r.ratio, 1.0) << r.name;
  }
  EXPECT_FALSE(cmp.b_attenuates);
  EXPECT_EQ(cmp.force_profile.size(), log.rows.size());
}

TEST(CompareRuns, NoContactGivesNoForceRatios) {
  const ScenarioConfig cfg = short_run("nominal-3link", 0.2);
  const SimLog log = run_scenario(cfg);
  const Comparison cmp = compare_runs(log, log);
  EXPECT_FALSE(cmp.terminal_force_ratio.has_value());
  for (const MetricRatio& r : cmp.ratios) {
    if (r.name == "peak_contact_force" || r.name == "terminal_mean_contact_force") {
      EXPECT_FALSE(r.ratio.has_value());
    }
  }
  for (const ForceSample& s : cmp.force_profile) EXPECT_FALSE(s.ratio.has_value());
}

TEST(CompareRuns, GeometryMismatch) {
  const SimLog a = run_scenario(short_run("nominal-3link", 0.05));
  const SimLog b = run_scenario(short_run("nominal-3link", 0.06));
  EXPECT_THROW(compare_runs(a, b), ContractError);
}

TEST(CompareRuns, ControllerChangeKeepsGeometry) {
  ScenarioConfig pd = short_run("d-analog", 0.1);
  ScenarioConfig rabic = pd;
  pd.controller.kind = ControllerKind::kPd;
  rabic.controller.kind = ControllerKind::kRabic;
  EXPECT_EQ(config::geometry_hash(pd), config::geometry_hash(rabic));
  EXPECT_NE(config::config_hash(pd), config::config_hash(rabic));
  EXPECT_NO_THROW(compare_runs(run_scenario(pd), run_scenario(rabic), "pd", "rabic"));
}

}  // namespace
}  // namespace rabic::sim
