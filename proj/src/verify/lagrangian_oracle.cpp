#include <cmath>
#include <numbers>

#include "rabic/verify.hpp"

namespace rabic::verify {
namespace {

using Real = long double;
using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using RMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

constexpr Real kDiffStep = 1e-5L;

struct Planar {
  Real x = 0, y = 0;
};

// omega x r for a planar rotation rate.
Planar cross(Real omega, Planar r) { return {-omega * r.y, omega * r.x}; }

struct Motion {
  Real kinetic = 0;
  Planar tip_velocity;
  Real tip_rate = 0;
};

// Walks the chain from the base outward, carrying the velocity of each joint
// point and the absolute rotation rate.
Motion propagate(const dynamics::RobotModel& model, const RVec& q, const RVec& qd) {
  const auto& links = model.links();
  const int nb = model.base_dofs();
  Motion out;
  Real heading = 0, rate = 0;
  Planar joint_pos, joint_vel;
  if (model.has_base()) {
    const auto& b = *model.params().base;
    const Real r = b.wheel_radius, w = b.half_track;
    heading = r * (q(0) - q(1)) / (2 * w);
    rate = r * (qd(0) - qd(1)) / (2 * w);
    const Real speed = r * (qd(0) + qd(1)) / 2;
    const Planar axle_vel{speed * std::cos(heading), speed * std::sin(heading)};
    out.kinetic += 0.5L * b.chassis_mass * (axle_vel.x * axle_vel.x + axle_vel.y * axle_vel.y);
    out.kinetic += 0.5L * b.chassis_inertia * rate * rate;
    joint_pos = {b.mount_offset * std::cos(heading), b.mount_offset * std::sin(heading)};
    const Planar spin = cross(rate, joint_pos);
    joint_vel = {axle_vel.x + spin.x, axle_vel.y + spin.y};
  }
  Real angle = heading;
  for (std::size_t k = 0; k < links.size(); ++k) {
    angle += q(nb + static_cast<int>(k));
    rate += qd(nb + static_cast<int>(k));
    const Planar dir{std::cos(angle), std::sin(angle)};
    const Planar to_com{links[k].com * dir.x, links[k].com * dir.y};
    const Planar to_next{links[k].length * dir.x, links[k].length * dir.y};
    const Planar vc = cross(rate, to_com);
    const Planar com_vel{joint_vel.x + vc.x, joint_vel.y + vc.y};
    out.kinetic += 0.5L * links[k].mass * (com_vel.x * com_vel.x + com_vel.y * com_vel.y);
    out.kinetic += 0.5L * links[k].inertia * rate * rate;
    const Planar vn = cross(rate, to_next);
    joint_vel = {joint_vel.x + vn.x, joint_vel.y + vn.y};
    joint_pos = {joint_pos.x + to_next.x, joint_pos.y + to_next.y};
  }
  out.tip_velocity = joint_vel;
  out.tip_rate = rate;
  return out;
}

Real potential(const dynamics::RobotModel& model, const RVec& q) {
  if (!model.params().in_plane_gravity) return 0;
  const auto& links = model.links();
  const int nb = model.base_dofs();
  Real angle = 0, x = 0, weighted = 0;
  for (std::size_t k = 0; k < links.size(); ++k) {
    angle += q(nb + static_cast<int>(k));
    weighted += links[k].mass * (x + links[k].com * std::cos(angle));
    x += links[k].length * std::cos(angle);
  }
  return -static_cast<Real>(model.params().gravity) * weighted;
}

RMat inertia(const dynamics::RobotModel& model, const RVec& q) {
  const int n = model.dofs();
  auto T = [&](const RVec& v) { return propagate(model, q, v).kinetic; };
  RMat D(n, n);
  for (int i = 0; i < n; ++i) {
    const RVec ei = RVec::Unit(n, i);
    D(i, i) = 2 * T(ei);
    for (int j = 0; j < i; ++j) {
      const RVec ej = RVec::Unit(n, j);
      D(i, j) = D(j, i) = T(ei + ej) - T(ei) - T(ej);
    }
  }
  return D;
}

RVec widen(const Vector& v) { return v.cast<Real>(); }

}  // namespace

double oracle_kinetic_energy(const dynamics::RobotModel& model, const Vector& theta,
                             const Vector& theta_dot) {
  return static_cast<double>(propagate(model, widen(theta), widen(theta_dot)).kinetic);
}

double oracle_potential_energy(const dynamics::RobotModel& model, const Vector& theta) {
  return static_cast<double>(potential(model, widen(theta)));
}

OracleTerms lagrangian_oracle(const dynamics::RobotModel& model, const Vector& theta,
                              const Vector& theta_dot) {
  const int n = model.dofs();
  const RVec q = widen(theta);
  const RVec qd = widen(theta_dot);

  std::vector<RMat> dD(n);
  RVec G(n);
  for (int i = 0; i < n; ++i) {
    RVec qp = q, qm = q;
    qp(i) += kDiffStep;
    qm(i) -= kDiffStep;
    dD[i] = (inertia(model, qp) - inertia(model, qm)) / (2 * kDiffStep);
    G(i) = (potential(model, qp) - potential(model, qm)) / (2 * kDiffStep);
  }
  RMat C = RMat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      Real sum = 0;
      for (int i = 0; i < n; ++i) {
        sum += 0.5L * (dD[i](k, j) + dD[j](k, i) - dD[k](i, j)) * qd(i);
      }
      C(k, j) = sum;
    }
  }
  OracleTerms out;
  out.D = inertia(model, q).cast<double>();
  out.C = C.cast<double>();
  out.G = G.cast<double>();
  out.J = Matrix::Zero(6, n);
  for (int i = 0; i < n; ++i) {
    const Motion m = propagate(model, q, RVec::Unit(n, i));
    out.J(0, i) = static_cast<double>(m.tip_velocity.x);
    out.J(1, i) = static_cast<double>(m.tip_velocity.y);
    out.J(5, i) = static_cast<double>(m.tip_rate);
  }
  return out;
}

Vector oracle_forward_dynamics(const dynamics::RobotModel& model, const Vector& theta,
                               const Vector& theta_dot, const Vector& tau,
                               const dynamics::Wrench& f_e) {
  const OracleTerms o = lagrangian_oracle(model, theta, theta_dot);
  const Vector rhs = tau - o.C * theta_dot - o.G - o.J.transpose() * f_e;
  return o.D.partialPivLu().solve(rhs);
}

double relative_error(const Matrix& a, const Matrix& b, double floor) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), floor);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

dynamics::RobotParams test_robot(int links, bool with_base) {
  static const dynamics::Link kLinks[] = {
      {2.0, 0.5, 0.25, 0.045},
      {1.5, 0.4, 0.18, 0.022},
      {0.8, 0.3, 0.12, 0.008},
  };
  dynamics::RobotParams p;
  for (int k = 0; k < links; ++k) p.links.push_back(kLinks[k % 3]);
  if (with_base) {
    dynamics::BaseSpec base;
    base.mount_offset = 0.15;
    p.base = base;
  } else {
    p.in_plane_gravity = true;
  }
  return p;
}

void random_state(std::mt19937_64& rng, int dofs, Vector& theta, Vector& theta_dot) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rate(-2.0, 2.0);
  theta.resize(dofs);
  theta_dot.resize(dofs);
  for (int i = 0; i < dofs; ++i) {
    theta(i) = angle(rng);
    theta_dot(i) = rate(rng);
  }
}

OracleReport compare_with_oracle(const dynamics::RobotModel& model, int samples,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OracleReport report;
  report.samples = samples;
  double worst = -1.0;
  Vector theta, theta_dot;
  for (int s = 0; s < samples; ++s) {
    random_state(rng, model.dofs(), theta, theta_dot);
    const dynamics::DynamicsTerms t = dynamics::compute_terms(model, theta, theta_dot);
    const OracleTerms o = lagrangian_oracle(model, theta, theta_dot);
    const double eD = relative_error(t.D, o.D);
    const double eC = relative_error(t.C, o.C);
    const double eG = relative_error(t.G, o.G);
    const double eJ = relative_error(t.J, o.J);
    report.worst_D = std::max(report.worst_D, eD);
    report.worst_C = std::max(report.worst_C, eC);
    report.worst_G = std::max(report.worst_G, eG);
    report.worst_J = std::max(report.worst_J, eJ);
    const double e = std::max({eD, eC, eG, eJ});
    if (e > worst) {
      worst = e;
      report.worst_theta = theta;
      report.worst_theta_dot = theta_dot;
    }
  }
  return report;
}

StructureReport check_structure(const dynamics::RobotModel& model, int samples,
                                std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  StructureReport report;
  report.samples = samples;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  Vector theta, theta_dot;
  const int n = model.dofs();
  for (int s = 0; s < samples; ++s) {
    random_state(rng, n, theta, theta_dot);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    const dynamics::DynamicsTerms t = dynamics::compute_terms(model, theta, theta_dot);
    report.max_asymmetry =
        std::max(report.max_asymmetry, (t.D - t.D.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(t.D, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = std::min(report.min_eigenvalue, eig.eigenvalues().minCoeff());
    const Matrix Dp = dynamics::inertia_with_derivatives(model, theta + h * theta_dot).D;
    const Matrix Dm = dynamics::inertia_with_derivatives(model, theta - h * theta_dot).D;
    const Matrix Ddot = (Dp - Dm) / (2.0 * h);
    report.max_skew_residual =
        std::max(report.max_skew_residual, std::abs(v.dot((Ddot - 2.0 * t.C) * v)));
  }
  return report;
}

EnergyReport passive_energy_drift(const dynamics::RobotModel& model, const Vector& theta0,
                                  const Vector& theta_dot0, double duration, double dt) {
  const int n = model.dofs();
  const Vector zero = Vector::Zero(n);
  auto deriv = [&](double, const Vector& x) {
    Vector dx(2 * n);
    dx << x.tail(n),
        dynamics::forward_dynamics(model, x.head(n), x.tail(n), zero, zero,
                                   dynamics::Wrench::Zero());
    return dx;
  };
  Vector x(2 * n);
  x << theta0, theta_dot0;
  EnergyReport report;
  report.initial = dynamics::total_energy(model, theta0, theta_dot0);
  const double scale = std::max(std::abs(report.initial), 1e-12);
  const auto steps = static_cast<long>(std::llround(duration / dt));
  for (long k = 0; k < steps; ++k) {
    x = numerics::rk4_step(deriv, x, static_cast<double>(k) * dt, dt);
    const double e = dynamics::total_energy(model, x.head(n), x.tail(n));
    report.max_relative_drift = std::max(report.max_relative_drift, std::abs(e - report.initial) / scale);
    report.final = e;
  }
  return report;
}

}  // namespace rabic::verify
