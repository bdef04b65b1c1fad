#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rabic/estimator.hpp"
#include "rabic/verify.hpp"

namespace rabic::estimator {
namespace {

const AdaptationRates kDefaultRates{50.0, 0.005, 0.1, 0.005};

JointEstimate fresh(int size) {
  JointEstimate j;
  j.phi_hat = Vector::Zero(size);
  return j;
}

TEST(EstimatorConfig, Validation) {
  EstimatorConfig cfg = EstimatorConfig::uniform(2, kDefaultRates);
  EXPECT_NO_THROW(cfg.validate(2));
  EXPECT_THROW(cfg.validate(3), ConfigError);
  cfg.sigma_psi(1) = 0.0;
  EXPECT_THROW(cfg.validate(2), ConfigError);
  cfg = EstimatorConfig::uniform(2, kDefaultRates, 0, 0);
  EXPECT_THROW(cfg.validate(2), ConfigError);
  EXPECT_EQ(EstimatorConfig::uniform(1, kDefaultRates, 2, 3).regressor_size(), 6);
}

TEST(Regressor, KnownValues) {
  EstimatorConfig cfg = EstimatorConfig::uniform(1, kDefaultRates, 1, 1);
  JointEstimate j = fresh(3);
  j.integral = 0.2;
  j.xi2_ref = 0.4;
  const Vector g = build_regressor(j, 0.3, cfg);
  EXPECT_DOUBLE_EQ(g(0), 1.0);
  EXPECT_DOUBLE_EQ(g(1), 0.2);
  EXPECT_NEAR(g(2), -0.1, 1e-16);

  cfg = EstimatorConfig::uniform(1, kDefaultRates, 2, 1);
  j = fresh(4);
  j.integral = 0.5;
  const Vector h = build_regressor(j, 0.0, cfg);
  EXPECT_DOUBLE_EQ(h(1), 0.5);
  EXPECT_DOUBLE_EQ(h(2), 0.25);
}

TEST(PredictUncertainty, KnownValues) {
  Vector g(3);
  g << 1.0, 0.4, -2.0;
  EXPECT_DOUBLE_EQ(predict_uncertainty(g, Vector::Zero(3)), 0.0);
  Vector phi(3);
  phi << 1.25, 7.0, 9.0;
  EXPECT_DOUBLE_EQ(predict_uncertainty(Vector::Unit(3, 0), phi), 1.25);
  EXPECT_THROW(predict_uncertainty(g, Vector::Zero(2)), ContractError);
}

TEST(UpdatePhi, KnownValues) {
  const JointEstimate j = fresh(3);
  EXPECT_EQ(update_phi(j, Vector::Unit(3, 0), 0.0, kDefaultRates, 1e-3).phi_hat, Vector::Zero(3));
  const JointEstimate k = update_phi(j, Vector::Unit(3, 0), 0.1, kDefaultRates, 1e-3);
  EXPECT_NEAR(k.phi_hat(0), 0.005, 1e-17);
  EXPECT_EQ(k.phi_hat(1), 0.0);
  EXPECT_EQ(k.phi_hat(2), 0.0);
}

TEST(UpdatePhi, PureLeakIsGeometric) {
  JointEstimate j = fresh(3);
  j.phi_hat << 2.0, -1.0, 0.5;
  const Vector start = j.phi_hat;
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) j = update_phi(j, Vector::Ones(3), 0.0, kDefaultRates, dt);
  const Vector expected = start * std::pow(1.0 - kDefaultRates.sigma_phi * dt, 1000);
  EXPECT_LT((j.phi_hat - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(UpdatePhi, Errors) {
  const JointEstimate j = fresh(3);
  EXPECT_THROW(update_phi(j, Vector::Ones(2), 0.1, kDefaultRates, 1e-3), ContractError);
  EXPECT_THROW(update_phi(j, Vector::Ones(3), std::nan(""), kDefaultRates, 1e-3), NumericError);
  EXPECT_THROW(update_phi(j, Vector::Ones(3), 0.1, kDefaultRates, 0.0), DomainError);
}

TEST(UpdatePsi, KnownValues) {
  JointEstimate j = fresh(1);
  EXPECT_EQ(update_psi(j, 0.0, kDefaultRates, 1e-3).psi_hat, 0.0);
  j.psi_hat = 1.0;
  EXPECT_NEAR(update_psi(j, 2.0, kDefaultRates, 1e-3).psi_hat, 1.000195, 1e-15);
  EXPECT_NEAR(update_psi(j, -2.0, kDefaultRates, 1e-3).psi_hat, 1.000195, 1e-15);
}

TEST(UpdatePsi, ApproachesFirstOrderEquilibrium) {
  // Exact solution of psi' = rho |s| - sigma psi from 0 is (rho|s|/sigma)(1 - e^{-sigma t}).
  const AdaptationRates fast{1.0, 0.5, 0.3, 0.5};
  const double s = 0.8, dt = 1e-3;
  const double tau = 1.0 / fast.sigma_psi;
  const int steps = static_cast<int>(10.0 * tau / dt);
  JointEstimate j = fresh(1);
  for (int k = 0; k < steps; ++k) j = update_psi(j, s, fast, dt);
  const double target = fast.rho_psi * s / fast.sigma_psi;
  EXPECT_NEAR(j.psi_hat, target, 0.01 * target);
  EXPECT_NEAR(j.psi_hat, target * (1.0 - std::exp(-10.0)), 1e-3 * target);
}

TEST(UpdatePsi, NeverNegative) {
  // A leak step larger than the state would overshoot below zero without the clamp.
  const AdaptationRates stiff{1.0, 1.0, 0.1, 2000.0};
  JointEstimate j = fresh(1);
  j.psi_hat = 0.3;
  for (int k = 0; k < 10; ++k) {
    j = update_psi(j, 0.0, stiff, 1e-3);
    EXPECT_GE(j.psi_hat, 0.0);
  }
  EXPECT_EQ(j.psi_hat, 0.0);
}

TEST(AdvanceIntegral, KnownValues) {
  JointEstimate j = fresh(3);
  j.xi2_ref = 0.7;
  for (int k = 0; k < 100; ++k) j = advance_integral(j, 0.7, 1e-3);
  EXPECT_EQ(j.integral, 0.0);

  j = fresh(3);
  j.last_offset = 1.0;
  for (int k = 0; k < 1000; ++k) j = advance_integral(j, 1.0, 1e-3);
  EXPECT_NEAR(j.integral, 1.0, 1e-9);
}

TEST(AdvanceIntegral, FullSinePeriodReturnsToZero) {
  const double dt = 1e-3, period = 2.0;
  JointEstimate j = fresh(3);
  const int steps = static_cast<int>(std::lround(period / dt));
  for (int k = 1; k <= steps; ++k) {
    j = advance_integral(j, std::sin(2.0 * std::numbers::pi * k * dt / period), dt);
  }
  EXPECT_LT(std::abs(j.integral), 1e-6);
}

TEST(EstimatorState, InitialExpansionPoint) {
  const EstimatorConfig cfg = EstimatorConfig::uniform(2, kDefaultRates, 2, 1);
  Vector xi2(2);
  xi2 << 0.3, -0.4;
  const EstimatorState s = EstimatorState::initial(cfg, xi2);
  ASSERT_EQ(s.joints.size(), 2u);
  EXPECT_EQ(s.joints[1].xi2_ref, -0.4);
  EXPECT_EQ(s.joints[0].phi_hat, Vector::Zero(4));
  EXPECT_EQ(s.joints[0].psi_hat, 0.0);
}

TEST(SyntheticPlant, PredictionConverges) {
  // H = 2 + 3 (xi2 - xi2_0); once adapted the prediction is within 5% of H.
  const verify::SyntheticRun run = verify::run_synthetic_plant(verify::SyntheticPlantConfig::standard());
  double worst = 0.0;
  for (const verify::SyntheticSample& s : run.samples) {
    if (s.t < 2.0) continue;
    worst = std::max(worst, std::abs(s.tau_hat - s.H) / std::abs(s.H));
    ASSERT_GE(s.psi_hat, 0.0);
  }
  EXPECT_LT(worst, 0.05);
}

}  // namespace
}  // namespace rabic::estimator
