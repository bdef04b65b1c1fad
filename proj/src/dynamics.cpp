#include "rabic/dynamics.hpp"

#include <cmath>
#include <string>

namespace rabic::dynamics {
namespace {

Vector2 perp(const Vector2& v) { return {-v.y(), v.x()}; }

void require_positive(double value, const std::string& field) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ConfigError(field + " must be positive, got " + std::to_string(value));
  }
}

void check_dims(const RobotModel& model, const Vector& v, const char* what) {
  if (v.size() != model.dofs()) {
    throw ContractError(std::string(what) + " has " + std::to_string(v.size()) +
                        " entries, model has " + std::to_string(model.dofs()) + " joints");
  }
}

// Geometry of the chain relative to the base reference point (axle midpoint, or
// the arm root for fixed-base arms), expressed in world orientation.
struct Chain {
  double heading = 0.0;
  Vector2 forward = {1.0, 0.0};
  std::vector<Vector2> pivots;  // pivots[k] = proximal joint of link k; pivots[nm] = tip
  std::vector<Vector2> coms;
  std::vector<double> angles;   // absolute link angles
};

Chain build_chain(const RobotModel& model, const Vector& theta) {
  const auto& links = model.links();
  const int nb = model.base_dofs();
  Chain chain;
  chain.heading = model.heading(theta);
  chain.forward = {std::cos(chain.heading), std::sin(chain.heading)};
  const double mount = model.has_base() ? model.params().base->mount_offset : 0.0;
  chain.pivots.push_back(mount * chain.forward);
  double angle = chain.heading;
  for (std::size_t k = 0; k < links.size(); ++k) {
    angle += theta(nb + static_cast<int>(k));
    const Vector2 dir(std::cos(angle), std::sin(angle));
    chain.angles.push_back(angle);
    chain.coms.push_back(chain.pivots.back() + links[k].com * dir);
    chain.pivots.push_back(chain.pivots.back() + links[k].length * dir);
  }
  return chain;
}

struct PointJacobian {
  Eigen::Matrix<double, 2, Eigen::Dynamic> Jv;
  std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> dJv;  // d Jv / d theta_i
};

// Jacobian of a point p rigidly attached to link k, plus its partial derivatives.
PointJacobian point_jacobian(const RobotModel& model, const Chain& chain, int k, const Vector2& p,
                             bool with_derivatives) {
  const int n = model.dofs();
  const int nb = model.base_dofs();
  PointJacobian out;
  out.Jv = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n);

  double a = 0.0, c = 0.0;
  if (model.has_base()) {
    const auto& base = *model.params().base;
    a = base.wheel_radius / 2.0;
    c = base.wheel_radius / (2.0 * base.half_track);
    const Vector2 spin = perp(p);
    out.Jv.col(0) = a * chain.forward + c * spin;
    out.Jv.col(1) = a * chain.forward - c * spin;
  }
  for (int j = 0; j <= k; ++j) out.Jv.col(nb + j) = perp(p - chain.pivots[j]);
  if (!with_derivatives) return out;

  // d(heading)/d(theta_i): +c, -c for the wheels, 0 for arm joints.
  auto dheading = [&](int i) { return i == 0 ? c : (i == 1 ? -c : 0.0); };
  // Partial of (p - pivots[j]) w.r.t. theta_i; j = -1 denotes the base point.
  auto drel = [&](int i, int j) -> Vector2 {
    const Vector2 rel = (j < 0 ? p : Vector2(p - chain.pivots[j]));
    if (i < nb) return dheading(i) * perp(rel);
    const int arm = i - nb;
    if (arm > k) return Vector2::Zero();
    // A joint proximal to pivot j turns the whole segment; a later one moves only p.
    if (arm <= j) return perp(rel);
    return perp(p - chain.pivots[arm]);
  };

  out.dJv.assign(n, Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n));
  for (int i = 0; i < n; ++i) {
    auto& d = out.dJv[i];
    if (model.has_base()) {
      const Vector2 dforward = dheading(i) * perp(chain.forward);
      const Vector2 dspin = perp(drel(i, -1));
      d.col(0) = a * dforward + c * dspin;
      d.col(1) = a * dforward - c * dspin;
    }
    for (int j = 0; j <= k; ++j) d.col(nb + j) = perp(drel(i, j));
  }
  return out;
}

Eigen::RowVectorXd angular_jacobian(const RobotModel& model, int k) {
  const int nb = model.base_dofs();
  Eigen::RowVectorXd Jw = Eigen::RowVectorXd::Zero(model.dofs());
  if (model.has_base()) {
    const auto& base = *model.params().base;
    const double c = base.wheel_radius / (2.0 * base.half_track);
    Jw(0) = c;
    Jw(1) = -c;
  }
  for (int j = 0; j <= k; ++j) Jw(nb + j) = 1.0;
  return Jw;
}

Matrix base_inertia(const RobotModel& model) {
  Matrix D = Matrix::Zero(model.dofs(), model.dofs());
  if (!model.has_base()) return D;
  const auto& base = *model.params().base;
  const double a = base.wheel_radius / 2.0;
  const double c = base.wheel_radius / (2.0 * base.half_track);
  const double m = base.chassis_mass * a * a;
  const double I = base.chassis_inertia * c * c;
  D(0, 0) = m + I;
  D(1, 1) = m + I;
  D(0, 1) = m - I;
  D(1, 0) = m - I;
  return D;
}

double inertia_condition(const Matrix& D) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(D, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

RobotModel::RobotModel(RobotParams params) : params_(std::move(params)) {
  if (params_.links.empty()) throw ConfigError("links must contain at least one link");
  for (std::size_t k = 0; k < params_.links.size(); ++k) {
    const auto& link = params_.links[k];
    const std::string prefix = "links[" + std::to_string(k) + "].";
    require_positive(link.mass, prefix + "mass");
    require_positive(link.length, prefix + "length");
    require_positive(link.inertia, prefix + "inertia");
    require_positive(link.com, prefix + "com");
    if (link.com > link.length) {
      throw ConfigError(prefix + "com must not exceed the link length");
    }
  }
  if (params_.base) {
    require_positive(params_.base->wheel_radius, "base.wheel_radius");
    require_positive(params_.base->half_track, "base.half_track");
    require_positive(params_.base->chassis_mass, "base.chassis_mass");
    require_positive(params_.base->chassis_inertia, "base.chassis_inertia");
    if (!std::isfinite(params_.base->mount_offset)) {
      throw ConfigError("base.mount_offset must be finite");
    }
    if (params_.in_plane_gravity) {
      throw ConfigError("in_plane_gravity is not supported together with a wheeled base");
    }
  }
  if (!std::isfinite(params_.gravity) || params_.gravity < 0.0) {
    throw ConfigError("gravity must be finite and nonnegative");
  }
  friction_ = Vector::Zero(dofs());
  if (!params_.friction.empty()) {
    if (static_cast<int>(params_.friction.size()) != dofs()) {
      throw ConfigError("friction must have one entry per joint (" + std::to_string(dofs()) + ")");
    }
    for (int i = 0; i < dofs(); ++i) {
      if (!std::isfinite(params_.friction[i]) || params_.friction[i] < 0.0) {
        throw ConfigError("friction[" + std::to_string(i) + "] must be nonnegative");
      }
      friction_(i) = params_.friction[i];
    }
  }
}

double RobotModel::heading(const Vector& theta) const {
  if (!params_.base) return 0.0;
  return params_.base->wheel_radius * (theta(0) - theta(1)) / (2.0 * params_.base->half_track);
}

InertiaDerivatives inertia_with_derivatives(const RobotModel& model, const Vector& theta) {
  check_dims(model, theta, "theta");
  const int n = model.dofs();
  const Chain chain = build_chain(model, theta);
  InertiaDerivatives out;
  out.D = base_inertia(model);
  out.dD.assign(n, Matrix::Zero(n, n));
  for (int k = 0; k < model.arm_dofs(); ++k) {
    const Link& link = model.links()[k];
    const PointJacobian pj = point_jacobian(model, chain, k, chain.coms[k], true);
    const Eigen::RowVectorXd Jw = angular_jacobian(model, k);
    out.D.noalias() += link.mass * pj.Jv.transpose() * pj.Jv;
    out.D.noalias() += link.inertia * Jw.transpose() * Jw;
    for (int i = 0; i < n; ++i) {
      const Matrix cross = pj.dJv[i].transpose() * pj.Jv;
      out.dD[i].noalias() += link.mass * (cross + cross.transpose());
    }
  }
  // Exact symmetry regardless of accumulation order.
  out.D = 0.5 * (out.D + out.D.transpose()).eval();
  return out;
}

Matrix end_effector_jacobian(const RobotModel& model, const Vector& theta) {
  check_dims(model, theta, "theta");
  const Chain chain = build_chain(model, theta);
  const int last = model.arm_dofs() - 1;
  const PointJacobian tip = point_jacobian(model, chain, last, chain.pivots.back(), false);
  Matrix J = Matrix::Zero(6, model.dofs());
  J.topRows(2) = tip.Jv;
  J.row(5) = angular_jacobian(model, last);
  return J;
}

double potential_energy(const RobotModel& model, const Vector& theta) {
  check_dims(model, theta, "theta");
  if (!model.params().in_plane_gravity) return 0.0;
  const Chain chain = build_chain(model, theta);
  double height_weighted = 0.0;
  for (int k = 0; k < model.arm_dofs(); ++k) {
    height_weighted += model.links()[k].mass * chain.coms[k].x();
  }
  return -model.params().gravity * height_weighted;
}

DynamicsTerms compute_terms(const RobotModel& model, const Vector& theta,
                            const Vector& theta_dot) {
  check_dims(model, theta, "theta");
  check_dims(model, theta_dot, "theta_dot");
  const int n = model.dofs();
  const InertiaDerivatives inertia = inertia_with_derivatives(model, theta);

  DynamicsTerms terms;
  terms.D = inertia.D;
  if (!terms.D.allFinite()) throw NumericError("compute_terms: non-finite inertia matrix");
  Eigen::LLT<Matrix> llt(terms.D);
  if (llt.info() != Eigen::Success) {
    throw NumericError("compute_terms: inertia matrix lost positive definiteness");
  }

  // C(k, j) = sum_i 1/2 (dD_kj/dq_i + dD_ki/dq_j - dD_ij/dq_k) qdot_i
  terms.C = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    terms.C.noalias() += 0.5 * theta_dot(i) * inertia.dD[i];
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        sum += (inertia.dD[j](k, i) - inertia.dD[k](i, j)) * theta_dot(i);
      }
      terms.C(k, j) += 0.5 * sum;
    }
  }

  terms.G = Vector::Zero(n);
  if (model.params().in_plane_gravity) {
    const Chain chain = build_chain(model, theta);
    const double g = model.params().gravity;
    for (int k = 0; k < model.arm_dofs(); ++k) {
      const PointJacobian pj = point_jacobian(model, chain, k, chain.coms[k], false);
      terms.G -= g * model.links()[k].mass * pj.Jv.row(0).transpose();
    }
  }
  terms.J = end_effector_jacobian(model, theta);
  return terms;
}

Vector forward_dynamics(const DynamicsTerms& terms, const Vector& theta_dot, const Vector& tau_r,
                        const Vector& tau_u, const Wrench& f_e) {
  const auto n = terms.D.rows();
  if (theta_dot.size() != n || tau_r.size() != n || tau_u.size() != n) {
    throw ContractError("forward_dynamics: dimension mismatch");
  }
  if (inertia_condition(terms.D) > kMaxInertiaCondition) {
    throw NumericError("forward_dynamics: inertia matrix is ill-conditioned");
  }
  const Vector rhs = tau_r + tau_u - terms.C * theta_dot - terms.G - terms.J.transpose() * f_e;
  if (!rhs.allFinite()) throw NumericError("forward_dynamics: non-finite generalized force");
  return terms.D.llt().solve(rhs);
}

Vector forward_dynamics(const RobotModel& model, const Vector& theta, const Vector& theta_dot,
                        const Vector& tau_r, const Vector& tau_u, const Wrench& f_e) {
  return forward_dynamics(compute_terms(model, theta, theta_dot), theta_dot, tau_r, tau_u, f_e);
}

Vector2 base_velocity(const RobotModel& model, const Vector& theta, const Vector& theta_dot) {
  check_dims(model, theta, "theta");
  check_dims(model, theta_dot, "theta_dot");
  if (!model.has_base()) return Vector2::Zero();
  const double phi = model.heading(theta);
  const double speed = model.params().base->wheel_radius * (theta_dot(0) + theta_dot(1)) / 2.0;
  return speed * Vector2(std::cos(phi), std::sin(phi));
}

EndEffectorState end_effector_state(const RobotModel& model, const Vector& theta,
                                    const Vector& theta_dot, const Vector2& base_position) {
  check_dims(model, theta, "theta");
  check_dims(model, theta_dot, "theta_dot");
  const Chain chain = build_chain(model, theta);
  const Matrix J = end_effector_jacobian(model, theta);
  const Vector twist = J * theta_dot;
  EndEffectorState state;
  state.pose.position = chain.pivots.back() + (model.has_base() ? base_position : Vector2::Zero());
  state.pose.orientation = chain.angles.back();
  state.velocity.linear = twist.head<2>();
  state.velocity.angular = twist(5);
  return state;
}

double total_energy(const RobotModel& model, const Vector& theta, const Vector& theta_dot) {
  check_dims(model, theta_dot, "theta_dot");
  const InertiaDerivatives inertia = inertia_with_derivatives(model, theta);
  return 0.5 * theta_dot.dot(inertia.D * theta_dot) + potential_energy(model, theta);
}

Vector friction_torque(const RobotModel& model, const Vector& theta_dot) {
  check_dims(model, theta_dot, "theta_dot");
  return -model.friction().cwiseProduct(theta_dot);
}

}  // namespace rabic::dynamics
