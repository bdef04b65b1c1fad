#pragma once

#include <cmath>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "rabic/errors.hpp"

namespace rabic::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Exponent of a signed power, restricted to (0, 2].
class PowerExponent {
 public:
  explicit PowerExponent(double value);
  double value() const { return value_; }

  /// Exponent 2l - 1 of the backstepping surface; rejects l outside (0.5, 1).
  static PowerExponent from_backstepping_order(double l);

 private:
  double value_;
};

/// sign(x) * |x|^q. Odd and monotone in x.
double signed_pow(double x, PowerExponent q);

/// |xi1|^(2(l-1)) with the base clamped below at eps. The exponent is negative,
/// so the unclamped factor is singular at xi1 = 0.
double guarded_power_deriv(double xi1, double l, double eps);

/// sign with sign(0) = 0.
inline double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

using DerivativeFn = std::function<Vector(double t, const Vector& state)>;

/// Classical fourth-order Runge-Kutta step. Throws NumericError carrying t when
/// a stage derivative is non-finite.
Vector rk4_step(const DerivativeFn& deriv, const Vector& state, double t, double dt);

/// Young-type inequality
///   |q1|^a |q2|^b <= a/(a+b) p |q1|^(a+b) + b/(a+b) p^(-a/b) |q2|^(a+b)
/// checked with absolute slack 1e-12.
bool check_young_inequality(double q1, double q2, double a, double b, double p);

/// Subadditivity of x^l for 0 < l < 1: (sum p_i)^l <= sum p_i^l, slack 1e-12.
bool check_power_subadditivity(std::span<const double> values, double l);

inline constexpr double kInequalitySlack = 1e-12;

/// Central-difference gradient. Generic over the scalar so verification code can
/// run it in extended precision.
template <typename Scalar, typename Fn>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> finite_difference_gradient(
    Fn&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, Scalar h) {
  if (!(h > Scalar(0))) throw DomainError("finite_difference_gradient: step must be positive");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad(x.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const Scalar up = f(probe);
    probe(i) = x(i) - h;
    const Scalar down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(static_cast<double>(up)) || !std::isfinite(static_cast<double>(down))) {
      throw NumericError("finite_difference_gradient: non-finite function value");
    }
    grad(i) = (up - down) / (Scalar(2) * h);
  }
  return grad;
}

inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                         const Vector& x, double h) {
  return finite_difference_gradient<double>(f, x, h);
}

bool all_finite(const Vector& v);

}  // namespace rabic::numerics
