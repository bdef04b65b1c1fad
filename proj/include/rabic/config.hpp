#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rabic/simulation.hpp"

namespace YAML {
class Node;
}

namespace rabic::config {

/// Parses a scenario from YAML text. Vector-valued fields accept either a list
/// with one entry per joint or a scalar broadcast to every joint. Unknown keys
/// are rejected. Throws ConfigError naming the offending field.
sim::ScenarioConfig parse_scenario(std::string_view yaml_text);

/// Canonical YAML for a scenario: every field present, fixed key order.
std::string dump_scenario(const sim::ScenarioConfig& cfg);

/// Reads a scenario from `path`. When no such file exists, tries `path.yaml`
/// and then the built-in preset whose name is the last path component.
sim::ScenarioConfig load_scenario(const std::string& path);

/// Copy of `cfg` with the node at the dotted `path` (list indices as numeric
/// segments) replaced by `value`. A scalar assigned to a list node is broadcast
/// to every element. Throws ConfigError when the path does not resolve.
sim::ScenarioConfig with_parameter(const sim::ScenarioConfig& cfg, const std::string& path,
                                   double value);

struct Preset {
  std::string_view name;
  std::string_view yaml;
};

/// Built-in scenario presets, identical to the files under presets/.
const std::vector<Preset>& presets();

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const sim::ScenarioConfig& cfg);
/// Hash of the parts that fix the physical setup: robot, contact, trajectory,
/// duration and dt. Controller, disturbance and seed are excluded.
std::string geometry_hash(const sim::ScenarioConfig& cfg);

}  // namespace rabic::config
