#include "rabic/disturbance.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rabic::dynamics {

void validate(const DisturbanceSpec& spec, int dofs) {
  if (!spec.joints.empty() && static_cast<int>(spec.joints.size()) != dofs) {
    throw ConfigError("disturbance.joints must have one entry per joint (" +
                      std::to_string(dofs) + ")");
  }
  for (std::size_t i = 0; i < spec.joints.size(); ++i) {
    const auto& s = spec.joints[i];
    if (!std::isfinite(s.amplitude) || !std::isfinite(s.frequency_hz) || !std::isfinite(s.phase)) {
      throw ConfigError("disturbance.joints[" + std::to_string(i) + "] must be finite");
    }
  }
  if (!std::isfinite(spec.wrench_noise_std) || spec.wrench_noise_std < 0.0) {
    throw ConfigError("disturbance.wrench_noise_std must be nonnegative");
  }
}

numerics::Vector disturbance_torque(const DisturbanceSpec& spec, double t, int dofs) {
  numerics::Vector tau = numerics::Vector::Zero(dofs);
  for (std::size_t i = 0; i < spec.joints.size() && static_cast<int>(i) < dofs; ++i) {
    const auto& s = spec.joints[i];
    switch (s.kind) {
      case TorqueSignal::Kind::kZero:
        break;
      case TorqueSignal::Kind::kConstant:
        tau(i) = s.amplitude;
        break;
      case TorqueSignal::Kind::kSinusoid:
        tau(i) = s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency_hz * t + s.phase);
        break;
    }
  }
  return tau;
}

}  // namespace rabic::dynamics
