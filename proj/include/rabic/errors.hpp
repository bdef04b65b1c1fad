#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace rabic {

/// Caller violated a structural precondition (dimension mismatch, wrong variant).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Floating-point failure: non-finite values, ill-conditioning, divergence.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, std::optional<double> time = std::nullopt,
                        std::optional<int> joint = std::nullopt)
      : std::runtime_error(decorate(what, time, joint)), time_(time), joint_(joint) {}

  std::optional<double> time() const { return time_; }
  std::optional<int> joint() const { return joint_; }

 private:
  static std::string decorate(const std::string& what, std::optional<double> time,
                              std::optional<int> joint) {
    std::string out = what;
    if (joint) out += " (joint " + std::to_string(*joint) + ")";
    if (time) out += " at t=" + std::to_string(*time) + " s";
    return out;
  }

  std::optional<double> time_;
  std::optional<int> joint_;
};

/// Invalid scenario configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rabic
