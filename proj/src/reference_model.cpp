#include "rabic/reference_model.hpp"

#include <cmath>
#include <string>

namespace rabic::reference {
namespace {

void require_positive_diagonal(const Vector& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) <= 0.0) {
      throw ConfigError(std::string("impedance.") + name + "[" + std::to_string(i) +
                        "] must be positive");
    }
  }
}

void check_sizes(const ImpedanceParams& imp, const ReferenceState& ref, const DesiredPoint& des,
                 const Matrix& J) {
  const auto n = imp.inertia.size();
  if (ref.theta_r.size() != n || ref.theta_r_dot.size() != n || des.theta.size() != n ||
      des.theta_dot.size() != n || des.theta_ddot.size() != n || J.rows() != 6 || J.cols() != n) {
    throw ContractError("reference model: dimension mismatch");
  }
}

}  // namespace

void ImpedanceParams::validate() const {
  const auto n = inertia.size();
  if (n == 0 || damping.size() != n || stiffness.size() != n || tau_d.size() != n) {
    throw ConfigError("impedance: inertia, damping, stiffness and tau_d must have equal length");
  }
  require_positive_diagonal(inertia, "inertia");
  require_positive_diagonal(damping, "damping");
  require_positive_diagonal(stiffness, "stiffness");
  if (!tau_d.allFinite()) throw ConfigError("impedance.tau_d must be finite");
}

Vector reference_accel(const ImpedanceParams& imp, const ReferenceState& ref,
                       const DesiredPoint& des, const dynamics::Wrench& f_e, const Matrix& J) {
  check_sizes(imp, ref, des, J);
  const Vector load = imp.tau_d - J.transpose() * f_e;
  const Vector restoring = imp.damping.cwiseProduct(ref.theta_r_dot - des.theta_dot) +
                           imp.stiffness.cwiseProduct(ref.theta_r - des.theta);
  return (load - restoring).cwiseQuotient(imp.inertia) + des.theta_ddot;
}

ReferenceState step_reference(const ImpedanceParams& imp, const ReferenceState& ref,
                              const DesiredPoint& des, const dynamics::Wrench& f_e,
                              const Matrix& J, double dt, double t) {
  check_sizes(imp, ref, des, J);
  const auto n = imp.inertia.size();
  Vector state(2 * n);
  state << ref.theta_r, ref.theta_r_dot;
  auto deriv = [&](double, const Vector& x) {
    ReferenceState r{x.head(n), x.tail(n)};
    Vector dx(2 * n);
    dx << r.theta_r_dot, reference_accel(imp, r, des, f_e, J);
    return dx;
  };
  const Vector next = numerics::rk4_step(deriv, state, t, dt);
  if (!next.allFinite()) throw NumericError("step_reference: non-finite reference state", t);
  return {next.head(n), next.tail(n)};
}

Vector steady_state_offset(const ImpedanceParams& imp, const Vector& tau_d,
                           const Vector& jacobian_transpose_wrench) {
  if (tau_d.size() != imp.stiffness.size() ||
      jacobian_transpose_wrench.size() != imp.stiffness.size()) {
    throw ContractError("steady_state_offset: dimension mismatch");
  }
  return (tau_d - jacobian_transpose_wrench).cwiseQuotient(imp.stiffness);
}

void TrajectorySpec::validate() const {
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw ConfigError("trajectory.horizon must be positive");
  }
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (!std::isfinite(joints[i].amplitude) || !std::isfinite(joints[i].omega)) {
      throw ConfigError("trajectory.joints[" + std::to_string(i) + "] must be finite");
    }
  }
}

DesiredPoint desired_point(const TrajectorySpec& spec, double t) {
  if (!(t >= 0.0)) throw DomainError("desired_point: t must be nonnegative");
  const auto n = static_cast<Eigen::Index>(spec.joints.size());
  DesiredPoint out{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const JointTrajectory& j = spec.joints[i];
    const double a = j.amplitude;
    switch (j.kind) {
      case JointTrajectory::Kind::kConstant:
        out.theta(i) = a;
        break;
      case JointTrajectory::Kind::kSinusoid: {
        const double w = j.omega / spec.horizon;
        out.theta(i) = a * std::sin(w * t);
        out.theta_dot(i) = a * w * std::cos(w * t);
        out.theta_ddot(i) = -a * w * w * std::sin(w * t);
        break;
      }
      case JointTrajectory::Kind::kSmoothedSinusoid: {
        const double w = j.omega;
        const double decay = std::exp(-w * t);
        const double ramp = 1.0 - decay * (1.0 + w * t);
        const double ramp_d = w * w * t * decay;
        const double ramp_dd = w * w * decay * (1.0 - w * t);
        const double s = std::sin(w * t);
        const double c = std::cos(w * t);
        out.theta(i) = a * s * ramp;
        out.theta_dot(i) = a * (w * c * ramp + s * ramp_d);
        out.theta_ddot(i) = a * (-w * w * s * ramp + 2.0 * w * c * ramp_d + s * ramp_dd);
        break;
      }
    }
  }
  return out;
}

}  // namespace rabic::reference
