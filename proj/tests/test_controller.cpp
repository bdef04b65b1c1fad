#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rabic/controller.hpp"
#include "rabic/verify.hpp"

namespace rabic::control {
namespace {

GainSet scalar_gains(double k1, double k2, double l = 0.999) {
  GainSet g;
  g.k1 = Vector::Constant(1, k1);
  g.k2 = Vector::Constant(1, k2);
  g.l = l;
  g.mu = Vector::Ones(1);
  g.D_hat = Matrix::Identity(1, 1);
  return g;
}

ErrorCoordinates coords(const GainSet& g, double xi1, double xi2) {
  ErrorCoordinates c;
  c.e = c.e_dot = Vector::Zero(1);
  c.xi1 = Vector::Constant(1, xi1);
  c.xi2 = Vector::Constant(1, xi2);
  c.s = surface(c.xi1, c.xi2, g);
  return c;
}

TEST(GainSet, Validation) {
  GainSet g = scalar_gains(1.0, 1.0);
  EXPECT_NO_THROW(g.validate(1));
  g.l = 1.0;
  EXPECT_THROW(g.validate(1), ConfigError);
  g = scalar_gains(-1.0, 1.0);
  EXPECT_THROW(g.validate(1), ConfigError);
  g = scalar_gains(1.0, 1.0);
  g.D_hat = Matrix::Constant(1, 1, -2.0);
  EXPECT_THROW(g.validate(1), ConfigError);
  g = scalar_gains(1.0, 1.0);
  EXPECT_THROW(g.validate(2), ConfigError);
}

TEST(ErrorCoords, ZeroWhenOnReference) {
  GainSet g = scalar_gains(2.0, 3.0);
  g.k1 = g.k2 = Vector::Ones(2);
  g.mu = Vector::Ones(2);
  g.D_hat = Matrix::Identity(2, 2);
  const Vector theta = Vector::Constant(2, 0.4), rate = Vector::Constant(2, -0.3);
  const ErrorCoordinates c0 = initial_error_coords({theta, rate}, theta, rate, g);
  const ErrorCoordinates c1 = error_coords({theta, rate}, theta, rate, g, c0, 1e-3);
  for (const Vector* v : {&c1.e, &c1.e_dot, &c1.xi1, &c1.xi2, &c1.s}) {
    EXPECT_EQ(*v, Vector::Zero(2));
  }
}

TEST(ErrorCoords, Xi2FromPositionError) {
  const GainSet g = scalar_gains(1.0, 1.0);
  const ErrorCoordinates c = initial_error_coords({Vector::Constant(1, 0.1), Vector::Zero(1)},
                                                  Vector::Zero(1), Vector::Zero(1), g);
  EXPECT_DOUBLE_EQ(c.e(0), 0.1);
  EXPECT_DOUBLE_EQ(c.xi2(0), 0.1);
  EXPECT_DOUBLE_EQ(c.xi1(0), 0.0);
}

TEST(ErrorCoords, Xi1IntegratesXi2) {
  // mu = 0 isolates xi2 = e_dot; a constant unit rate error integrates to 1 in 1 s.
  GainSet g = scalar_gains(1.0, 1.0);
  g.mu = Vector::Zero(1);
  const reference::ReferenceState ref{Vector::Zero(1), Vector::Ones(1)};
  ErrorCoordinates c = initial_error_coords(ref, Vector::Zero(1), Vector::Zero(1), g);
  for (int k = 0; k < 1000; ++k) c = error_coords(ref, Vector::Zero(1), Vector::Zero(1), g, c, 1e-3);
  EXPECT_NEAR(c.xi1(0), 1.0, 1e-9);
}

TEST(ErrorCoords, SurfaceConsistentWithSignedPower) {
  const GainSet g = scalar_gains(5.76, 7.7, 0.8);
  const ErrorCoordinates c = coords(g, -0.3, 0.25);
  const double expected = 0.25 + 5.76 * -std::pow(0.3, 2.0 * 0.8 - 1.0);
  EXPECT_NEAR(c.s(0), expected, 1e-15);
}

TEST(RabicTorque, ZeroInputsZeroTorque) {
  const GainSet g = scalar_gains(1.0, 1.0);
  const Vector tau = rabic_torque(g, coords(g, 0.0, 0.0), Vector::Zero(1), Vector::Zero(1));
  EXPECT_EQ(tau(0), 0.0);
}

TEST(RabicTorque, ScalarValue) {
  const GainSet g = scalar_gains(1.0, 1.0);
  const Vector tau =
      rabic_torque(g, coords(g, 0.5, 0.2), Vector::Constant(1, 0.3), Vector::Constant(1, 0.1));
  EXPECT_NEAR(tau(0), 1.8010691532073564, 1e-13);
}

TEST(RabicTorque, OddInErrorWithFixedBound) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const GainSet g = scalar_gains(3.0, 4.0, 0.75);
  for (int k = 0; k < 200; ++k) {
    const double x1 = u(rng), x2 = u(rng), th = u(rng);
    const Vector psi = Vector::Constant(1, std::abs(u(rng)));
    const Vector a = rabic_torque(g, coords(g, x1, x2), Vector::Constant(1, th), psi);
    const Vector b = rabic_torque(g, coords(g, -x1, -x2), Vector::Constant(1, -th), psi);
    EXPECT_EQ(a(0), -b(0));
  }
}

TEST(RabicTorque, FullInertiaMatrix) {
  GainSet g;
  g.k1 = g.k2 = Vector::Ones(2);
  g.mu = Vector::Ones(2);
  g.l = 0.9;
  g.D_hat = Matrix::Identity(2, 2);
  ErrorCoordinates c;
  c.e = c.e_dot = Vector::Zero(2);
  c.xi1 = Vector::Constant(2, 0.2);
  c.xi2 = Vector::Constant(2, -0.1);
  c.s = surface(c.xi1, c.xi2, g);
  const Vector bracket = rabic_torque(g, c, Vector::Zero(2), Vector::Zero(2));
  g.D_hat << 2.0, 0.5, 0.5, 1.0;
  const Vector tau = rabic_torque(g, c, Vector::Zero(2), Vector::Zero(2));
  EXPECT_LT((tau - g.D_hat * bracket).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(RabicTorque, SmoothedSign) {
  EXPECT_EQ(robust_sign(0.0, 0.0), 0.0);
  EXPECT_EQ(robust_sign(-3.0, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(robust_sign(0.05, 0.1), 0.5);
  EXPECT_DOUBLE_EQ(robust_sign(-0.5, 0.1), -1.0);
}

TEST(RabicTorque, DimensionMismatch) {
  const GainSet g = scalar_gains(1.0, 1.0);
  EXPECT_THROW(rabic_torque(g, coords(g, 0.1, 0.1), Vector::Zero(2), Vector::Zero(1)),
               ContractError);
}

TEST(PdTorque, KnownValues) {
  PdGains pd{Vector::Constant(1, 60.0), Vector::Constant(1, 24.0)};
  const Vector z = Vector::Zero(1);
  EXPECT_EQ(pd_torque(pd, z, z, z, z)(0), 0.0);
  EXPECT_DOUBLE_EQ(pd_torque(pd, Vector::Constant(1, 0.1), z, z, z)(0), 6.0);
  EXPECT_DOUBLE_EQ(pd_torque(pd, z, Vector::Constant(1, -0.5), z, z)(0), -12.0);
  PdGains bad{Vector::Constant(1, 1.0), Vector::Constant(1, -0.5)};
  EXPECT_THROW(bad.validate(1), ConfigError);
}

TEST(Lyapunov, KnownValues) {
  const estimator::AdaptationRates r{50.0, 0.005, 0.1, 0.005};
  EXPECT_EQ(lyapunov_value(0.0, 0.0, Vector::Zero(3), 0.0, r), 0.0);
  EXPECT_DOUBLE_EQ(lyapunov_value(1.0, 0.0, Vector::Zero(3), 0.0, r), 0.5);
  Vector phi(2);
  phi << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(lyapunov_value(0.0, 2.0, phi, 0.5, r), 2.0 + 25.0 / 100.0 + 0.25 / 0.2);
}

TEST(Lyapunov, MatchesLoggedSignals) {
  // Re-evaluate V from the raw logged signals of a synthetic run.
  const verify::SyntheticPlantConfig cfg = verify::SyntheticPlantConfig::standard();
  const verify::SyntheticRun run = verify::run_synthetic_plant(cfg);
  const estimator::AdaptationRates r = cfg.estimator.rates(0);
  double worst = 0.0;
  for (std::size_t k = 0; k < run.samples.size(); k += 97) {
    const verify::SyntheticSample& s = run.samples[k];
    const Vector phi_tilde = cfg.phi_true - s.phi_hat;
    const double psi_tilde = run.psi_true - s.psi_hat;
    const double v = 0.5 * s.xi1 * s.xi1 + 0.5 * s.s * s.s +
                     0.5 * phi_tilde.squaredNorm() / r.rho_phi + 0.5 * psi_tilde * psi_tilde / r.rho_psi;
    worst = std::max(worst, std::abs(v - s.V));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(StabilityConstants, RhoIsSmallestRate) {
  GainSet g = scalar_gains(5.76, 7.7);
  const estimator::EstimatorConfig cfg =
      estimator::EstimatorConfig::uniform(1, {50.0, 0.005, 0.1, 0.005});
  const StabilityEntry e = stability_constants(g, cfg, Vector::Zero(3), 0.0, 0);
  EXPECT_DOUBLE_EQ(e.rho, 0.005);
  g.k1(0) = 0.001;
  EXPECT_DOUBLE_EQ(stability_constants(g, cfg, Vector::Zero(3), 0.0, 0).rho, 0.002);
  EXPECT_THROW(stability_constants(g, cfg, Vector::Zero(3), 0.0, 1), ContractError);
}

TEST(StabilityConstants, ResidualClosedForm) {
  const GainSet g = scalar_gains(5.76, 7.7);
  const estimator::EstimatorConfig cfg =
      estimator::EstimatorConfig::uniform(1, {50.0, 0.005, 0.1, 0.005});
  Vector phi(3);
  phi << 2.0, 0.0, 3.0;
  const StabilityEntry e = stability_constants(g, cfg, phi, 0.4, 0);
  const double p = 0.36806348825922327;  // l^(l/(1-l)) at l = 0.999
  const double wp = 0.005 / 100.0, ws = 0.005 / 0.2;
  EXPECT_NEAR(e.c, (wp + ws) * 0.001 * p + wp * 13.0 + ws * 0.16, 1e-15);
  EXPECT_NEAR(residual_level(e), std::pow(e.c / e.rho, 1.0 / 0.999), 1e-15);
}

TEST(StabilityConstants, ResidualVanishesAsOrderApproachesOne) {
  const estimator::EstimatorConfig cfg =
      estimator::EstimatorConfig::uniform(1, {50.0, 0.005, 0.1, 0.005});
  double last = 1.0;
  for (double l : {0.9, 0.99, 0.999, 0.99999}) {
    const double c = stability_constants(scalar_gains(1.0, 1.0, l), cfg, Vector::Zero(3), 0.0, 0).c;
    EXPECT_LT(c, last);
    last = c;
  }
  EXPECT_LT(last, 1e-6);
}

}  // namespace
}  // namespace rabic::control
