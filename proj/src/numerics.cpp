#include "rabic/numerics.hpp"

#include <numeric>
#include <string>

namespace rabic::numerics {

PowerExponent::PowerExponent(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0 || value > 2.0) {
    throw DomainError("power exponent must lie in (0, 2], got " + std::to_string(value));
  }
}

PowerExponent PowerExponent::from_backstepping_order(double l) {
  if (!std::isfinite(l) || l <= 0.5 || l >= 1.0) {
    throw DomainError("backstepping order l must lie in (0.5, 1), got " + std::to_string(l));
  }
  return PowerExponent(2.0 * l - 1.0);
}

double signed_pow(double x, PowerExponent q) {
  if (!std::isfinite(x)) throw DomainError("signed_pow: non-finite base");
  if (x == 0.0) return 0.0;
  const double magnitude = std::pow(std::abs(x), q.value());
  return x < 0.0 ? -magnitude : magnitude;
}

double guarded_power_deriv(double xi1, double l, double eps) {
  if (!std::isfinite(xi1) || !std::isfinite(l) || !std::isfinite(eps)) {
    throw DomainError("guarded_power_deriv: non-finite input");
  }
  if (l <= 0.5 || l >= 1.0) throw DomainError("guarded_power_deriv: l must lie in (0.5, 1)");
  if (eps <= 0.0) throw DomainError("guarded_power_deriv: eps must be positive");
  const double base = std::max(std::abs(xi1), eps);
  return std::pow(base, 2.0 * (l - 1.0));
}

Vector rk4_step(const DerivativeFn& deriv, const Vector& state, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");
  auto eval = [&](double tau, const Vector& x) {
    Vector k = deriv(tau, x);
    if (k.size() != state.size()) throw ContractError("rk4_step: derivative has wrong size");
    if (!all_finite(k)) throw NumericError("rk4_step: non-finite derivative", t);
    return k;
  };
  const double half = 0.5 * dt;
  const Vector k1 = eval(t, state);
  const Vector k2 = eval(t + half, state + half * k1);
  const Vector k3 = eval(t + half, state + half * k2);
  const Vector k4 = eval(t + dt, state + dt * k3);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool check_young_inequality(double q1, double q2, double a, double b, double p) {
  if (!(a > 0.0) || !(b > 0.0) || !(p > 0.0)) {
    throw DomainError("check_young_inequality: a, b and p must be positive");
  }
  // Extended precision keeps the roundoff well inside the absolute slack.
  using L = long double;
  const L x = std::abs(static_cast<L>(q1));
  const L y = std::abs(static_cast<L>(q2));
  const L la = a, lb = b, lp = p;
  const L lhs = std::pow(x, la) * std::pow(y, lb);
  const L rhs = la / (la + lb) * lp * std::pow(x, la + lb) +
                lb / (la + lb) * std::pow(lp, -la / lb) * std::pow(y, la + lb);
  return lhs <= rhs + static_cast<L>(kInequalitySlack);
}

bool check_power_subadditivity(std::span<const double> values, double l) {
  if (!(l > 0.0) || !(l < 1.0)) throw DomainError("check_power_subadditivity: l must lie in (0, 1)");
  using L = long double;
  L sum = 0.0L;
  L sum_of_powers = 0.0L;
  for (double v : values) {
    if (!(v >= 0.0)) throw DomainError("check_power_subadditivity: entries must be nonnegative");
    sum += v;
    sum_of_powers += std::pow(static_cast<L>(v), static_cast<L>(l));
  }
  return std::pow(sum, static_cast<L>(l)) <= sum_of_powers + static_cast<L>(kInequalitySlack);
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace rabic::numerics
