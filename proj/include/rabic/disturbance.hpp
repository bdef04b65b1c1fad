#pragma once

#include <vector>

#include "rabic/numerics.hpp"

namespace rabic::dynamics {

/// Additive joint torque signal, one per joint.
struct TorqueSignal {
  enum class Kind { kZero, kConstant, kSinusoid };
  Kind kind = Kind::kZero;
  double amplitude = 0.0;     // N m (the constant value for kConstant)
  double frequency_hz = 0.0;  // Hz
  double phase = 0.0;         // rad
};

/// Lumped additive uncertainty injected into the plant. Viscous friction is
/// added separately from the robot model.
struct DisturbanceSpec {
  std::vector<TorqueSignal> joints;  // empty = no disturbance
  double wrench_noise_std = 0.0;     // N, white noise on the wrench fed to the reference model
};

void validate(const DisturbanceSpec& spec, int dofs);

numerics::Vector disturbance_torque(const DisturbanceSpec& spec, double t, int dofs);

}  // namespace rabic::dynamics
