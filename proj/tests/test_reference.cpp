#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rabic/reference_model.hpp"
#include "rabic/verify.hpp"

namespace rabic::reference {
namespace {

ImpedanceParams unit_impedance(int n) {
  return {Vector::Ones(n), Vector::Ones(n), Vector::Ones(n), Vector::Zero(n)};
}

ImpedanceParams default_impedance(int n) {
  return {Vector::Ones(n), Vector::Constant(n, 20.0), Vector::Ones(n), Vector::Zero(n)};
}

DesiredPoint still(const Vector& theta) {
  return {theta, Vector::Zero(theta.size()), Vector::Zero(theta.size())};
}

TEST(Impedance, Validation) {
  ImpedanceParams imp = unit_impedance(2);
  EXPECT_NO_THROW(imp.validate());
  imp.inertia(1) = 0.0;
  EXPECT_THROW(imp.validate(), ConfigError);
  imp = unit_impedance(2);
  imp.stiffness = Vector::Ones(3);
  EXPECT_THROW(imp.validate(), ConfigError);
}

TEST(ReferenceAccel, TracksDesiredWhenAligned) {
  const ImpedanceParams imp = default_impedance(2);
  DesiredPoint des{Vector::Constant(2, 0.3), Vector::Constant(2, -0.2), Vector::Constant(2, 1.5)};
  const ReferenceState ref{des.theta, des.theta_dot};
  const Vector acc = reference_accel(imp, ref, des, dynamics::Wrench::Zero(), Matrix::Zero(6, 2));
  EXPECT_EQ(acc, des.theta_ddot);
}

TEST(ReferenceAccel, UnitStiffnessPull) {
  const ImpedanceParams imp = unit_impedance(1);
  const DesiredPoint des{Vector::Zero(1), Vector::Zero(1), Vector::Constant(1, 0.25)};
  const ReferenceState ref{Vector::Ones(1), Vector::Zero(1)};
  const Vector acc = reference_accel(imp, ref, des, dynamics::Wrench::Zero(), Matrix::Zero(6, 1));
  EXPECT_DOUBLE_EQ(acc(0), 0.25 - 1.0);
}

TEST(ReferenceAccel, WrenchEntersThroughJacobianTranspose) {
  const ImpedanceParams imp = unit_impedance(2);
  const DesiredPoint des = still(Vector::Zero(2));
  const ReferenceState ref{Vector::Zero(2), Vector::Zero(2)};
  Matrix J = Matrix::Zero(6, 2);
  J(0, 0) = 2.0;
  J(1, 1) = -1.0;
  dynamics::Wrench f = dynamics::Wrench::Zero();
  f(0) = 3.0;
  f(1) = 1.0;
  const Vector acc = reference_accel(imp, ref, des, f, J);
  EXPECT_DOUBLE_EQ(acc(0), -6.0);
  EXPECT_DOUBLE_EQ(acc(1), 1.0);
}

TEST(ReferenceAccel, DimensionMismatch) {
  const ImpedanceParams imp = unit_impedance(2);
  const ReferenceState ref{Vector::Zero(3), Vector::Zero(3)};
  EXPECT_THROW(reference_accel(imp, ref, still(Vector::Zero(2)), dynamics::Wrench::Zero(),
                               Matrix::Zero(6, 2)),
               ContractError);
}

TEST(StepReference, ZeroInputsKeepState) {
  const ImpedanceParams imp = default_impedance(3);
  const ReferenceState ref{Vector::Zero(3), Vector::Zero(3)};
  const ReferenceState next =
      step_reference(imp, ref, still(Vector::Zero(3)), dynamics::Wrench::Zero(), Matrix::Zero(6, 3),
                     1e-3);
  EXPECT_EQ(next.theta_r, ref.theta_r);
  EXPECT_EQ(next.theta_r_dot, ref.theta_r_dot);
}

TEST(StepReference, NonFiniteStateCarriesTime) {
  const ImpedanceParams imp = unit_impedance(1);
  const ReferenceState ref{Vector::Constant(1, std::nan("")), Vector::Zero(1)};
  try {
    step_reference(imp, ref, still(Vector::Zero(1)), dynamics::Wrench::Zero(), Matrix::Zero(6, 1),
                   1e-3, 4.0);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    ASSERT_TRUE(e.time().has_value());
    EXPECT_DOUBLE_EQ(*e.time(), 4.0);
  }
}

TEST(StepReference, SettlesToStaticOffset) {
  // 2-link arm Jacobian, constant wrench: the settled offset is K^{-1}(tau_d - J^T f).
  const dynamics::RobotModel model(verify::test_robot(2, false));
  Vector theta(2);
  theta << 0.4, 0.9;
  const Matrix J = dynamics::end_effector_jacobian(model, theta);
  dynamics::Wrench f = dynamics::Wrench::Zero();
  f(0) = 1.5;
  f(1) = -0.7;
  ImpedanceParams imp = default_impedance(2);
  imp.stiffness << 1.0, 10.0;
  imp.tau_d << 0.2, -0.1;
  const verify::SettlingReport r = verify::settle_reference(imp, theta, f, J, 400.0, 0.01);
  EXPECT_LT(r.max_error, 1e-6);
}

TEST(StepReference, UnforcedDecayIsMonotone) {
  // M = 1, B = 20, K = 1 is overdamped: once released from rest the deviation
  // shrinks monotonically.
  const ImpedanceParams imp = default_impedance(1);
  ReferenceState ref{Vector::Constant(1, 0.5), Vector::Zero(1)};
  const DesiredPoint des = still(Vector::Zero(1));
  double last = std::abs(ref.theta_r(0));
  for (int k = 0; k < 10000; ++k) {
    ref = step_reference(imp, ref, des, dynamics::Wrench::Zero(), Matrix::Zero(6, 1), 1e-3);
    const double now = std::abs(ref.theta_r(0));
    ASSERT_LE(now, last) << "step " << k;
    last = now;
  }
  EXPECT_LT(last, 0.5);
}

TEST(StepReference, FourthOrderInStep) {
  const ImpedanceParams imp = {Vector::Ones(1), Vector::Constant(1, 0.5), Vector::Constant(1, 4.0),
                               Vector::Zero(1)};
  const DesiredPoint des = still(Vector::Zero(1));
  auto run = [&](double dt) {
    ReferenceState ref{Vector::Ones(1), Vector::Zero(1)};
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) {
      ref = step_reference(imp, ref, des, dynamics::Wrench::Zero(), Matrix::Zero(6, 1), dt);
    }
    return ref.theta_r(0);
  };
  const double ref_value = run(1e-4);
  const double ratio = std::abs(run(0.02) - ref_value) / std::abs(run(0.01) - ref_value);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(SteadyStateOffset, KnownValues) {
  ImpedanceParams imp = unit_impedance(2);
  const Vector jtf = Vector::Constant(2, 0.7);
  EXPECT_EQ(steady_state_offset(imp, jtf, jtf), Vector::Zero(2));
  Vector unit = Vector::Zero(2);
  unit(0) = 1.0;
  EXPECT_DOUBLE_EQ(steady_state_offset(imp, Vector::Zero(2), unit)(0), -1.0);
  imp.stiffness(0) = 10.0;  // joint 1 stiffness of the d-analog preset
  EXPECT_DOUBLE_EQ(steady_state_offset(imp, Vector::Zero(2), unit)(0), -0.1);
  EXPECT_THROW(steady_state_offset(imp, Vector::Zero(3), unit), ContractError);
}

TEST(DesiredPoint, SinusoidValues) {
  TrajectorySpec spec;
  spec.horizon = 2.5;
  spec.joints = {{JointTrajectory::Kind::kSinusoid, 8.0, 0.2 * std::numbers::pi}};
  EXPECT_DOUBLE_EQ(desired_point(spec, 0.0).theta(0), 0.0);
  EXPECT_NEAR(desired_point(spec, 2.5).theta(0), 4.702282018339785, 1e-14);
  EXPECT_NEAR(desired_point(spec, 2.5).theta(0), 8.0 * std::sin(0.2 * std::numbers::pi), 1e-14);
}

TEST(DesiredPoint, SmoothedSinusoidStartsAtRest) {
  TrajectorySpec spec;
  spec.joints = {{JointTrajectory::Kind::kSmoothedSinusoid, 0.7, 2.0 * std::numbers::pi / 20.0}};
  const DesiredPoint p = desired_point(spec, 0.0);
  EXPECT_EQ(p.theta(0), 0.0);
  EXPECT_EQ(p.theta_dot(0), 0.0);
}

TEST(DesiredPoint, DerivativesMatchDifferences) {
  TrajectorySpec spec;
  spec.horizon = 2.5;
  spec.joints = {{JointTrajectory::Kind::kSinusoid, 1.2, 0.3 * std::numbers::pi},
                 {JointTrajectory::Kind::kSmoothedSinusoid, 0.7, 0.314},
                 {JointTrajectory::Kind::kConstant, 1.7, 0.0}};
  const double h = 1e-5;
  for (double t : {0.5, 3.0, 12.7}) {
    const DesiredPoint a = desired_point(spec, t - h);
    const DesiredPoint b = desired_point(spec, t + h);
    const DesiredPoint m = desired_point(spec, t);
    EXPECT_LT(((b.theta - a.theta) / (2 * h) - m.theta_dot).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(((b.theta_dot - a.theta_dot) / (2 * h) - m.theta_ddot).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_DOUBLE_EQ(desired_point(spec, 5.0).theta(2), 1.7);
}

TEST(DesiredPoint, NegativeTime) {
  TrajectorySpec spec;
  spec.joints = {{}};
  EXPECT_THROW(desired_point(spec, -1e-9), DomainError);
}

}  // namespace
}  // namespace rabic::reference
