#include "rabic/config.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace rabic::config {
namespace {

using numerics::Matrix;
using numerics::Vector;

// Typed access to one YAML mapping. Tracks consumed keys so that leftovers can
// be reported as unknown fields.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_ + " must be a mapping");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(node_[key], field(key));
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw missing(key);
    return as_number(node_[key], field(key));
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<int>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key) + " must be an integer");
    }
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key) + " must be a nonnegative integer");
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key) + " must be true or false");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!node_[key].IsScalar()) throw ConfigError(field(key) + " must be a string");
    return node_[key].Scalar();
  }

  /// Scalar broadcast or list of exactly `size` numbers.
  Vector vector(const std::string& key, int size, std::optional<double> fallback) {
    if (!has(key)) {
      if (!fallback) throw missing(key);
      return Vector::Constant(size, *fallback);
    }
    return as_vector(node_[key], field(key), size);
  }

  /// Any-length list of numbers; absent gives an empty vector.
  Vector free_vector(const std::string& key) {
    if (!has(key)) return {};
    const YAML::Node n = node_[key];
    if (!n.IsSequence()) throw ConfigError(field(key) + " must be a list");
    return as_vector(n, field(key), static_cast<int>(n.size()));
  }

  YAML::Node child(const std::string& key) {
    used_.insert(key);
    return node_ ? node_[key] : YAML::Node();
  }

  /// "is required" error, naming a present key that looks like a misspelling.
  ConfigError missing(const std::string& key) const {
    std::string msg = field(key) + " is required";
    if (node_ && node_.IsMap()) {
      for (const auto& kv : node_) {
        const std::string other = kv.first.as<std::string>();
        if (!used_.count(other) && edit_distance(key, other) <= 2) {
          msg += " (found unknown field " + field(other) + ")";
          break;
        }
      }
    }
    return ConfigError(msg);
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigError("unknown field " + field(key));
    }
  }

  static double as_number(const YAML::Node& n, const std::string& name) {
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(name + " must be a number");
    }
    if (!std::isfinite(v)) throw ConfigError(name + " must be finite");
    return v;
  }

  static Vector as_vector(const YAML::Node& n, const std::string& name, int size) {
    if (n.IsScalar()) return Vector::Constant(size, as_number(n, name));
    if (!n.IsSequence()) throw ConfigError(name + " must be a number or a list");
    if (static_cast<int>(n.size()) != size) {
      throw ConfigError(name + " must have " + std::to_string(size) + " entries, got " +
                        std::to_string(n.size()));
    }
    Vector v(size);
    for (int i = 0; i < size; ++i) v(i) = as_number(n[i], name + "[" + std::to_string(i) + "]");
    return v;
  }

  static std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1 : 0)});
        diag = up;
      }
    }
    return row[b.size()];
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

dynamics::Vector2 as_point(Section& s, const std::string& key, dynamics::Vector2 fallback) {
  if (!s.has(key)) return fallback;
  const Vector v = s.vector(key, 2, std::nullopt);
  return {v(0), v(1)};
}

dynamics::RobotParams parse_robot(YAML::Node node) {
  if (!node) throw ConfigError("robot section is required");
  Section s(node, "robot");
  dynamics::RobotParams p;
  p.gravity = s.number("gravity", p.gravity);
  p.in_plane_gravity = s.boolean("in_plane_gravity", p.in_plane_gravity);
  if (s.has("base")) {
    Section b(s.child("base"), "robot.base");
    dynamics::BaseSpec base;
    base.wheel_radius = b.number("wheel_radius", base.wheel_radius);
    base.half_track = b.number("half_track", base.half_track);
    base.chassis_mass = b.number("chassis_mass", base.chassis_mass);
    base.chassis_inertia = b.number("chassis_inertia", base.chassis_inertia);
    base.mount_offset = b.number("mount_offset", base.mount_offset);
    b.finish();
    p.base = base;
  }
  const YAML::Node links = s.child("links");
  if (!links || !links.IsSequence() || links.size() == 0) {
    throw ConfigError("robot.links must be a nonempty list");
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    Section l(links[i], indexed("robot.links", i));
    dynamics::Link link;
    link.mass = l.required_number("mass");
    link.length = l.required_number("length");
    link.com = l.number("com", 0.5 * link.length);
    link.inertia = l.number("inertia", link.mass * link.length * link.length / 12.0);
    l.finish();
    p.links.push_back(link);
  }
  const int n = static_cast<int>(p.links.size()) + (p.base ? 2 : 0);
  if (s.has("friction")) {
    const Vector f = s.vector("friction", n, std::nullopt);
    p.friction.assign(f.data(), f.data() + f.size());
  }
  s.finish();
  return p;
}

dynamics::ContactModel parse_contact(YAML::Node node) {
  Section s(node, "contact");
  dynamics::ContactModel c;
  const std::string shape = s.text("shape", "wall");
  if (shape == "wall") {
    c.shape = dynamics::ObstacleShape::kWall;
  } else if (shape == "box") {
    c.shape = dynamics::ObstacleShape::kBox;
  } else {
    throw ConfigError("contact.shape must be 'box' or 'wall', got '" + shape + "'");
  }
  c.center = as_point(s, "center", c.center);
  c.half_extents = as_point(s, "half_extents", c.half_extents);
  c.normal = as_point(s, "normal", c.normal);
  c.stiffness = s.number("stiffness", c.stiffness);
  c.damping = s.number("damping", c.damping);
  c.friction = s.number("friction", c.friction);
  c.ground_friction = s.number("ground_friction", c.ground_friction);
  c.mass = s.number("mass", c.mass);
  c.pushable = s.boolean("pushable", c.pushable);
  c.slip_velocity = s.number("slip_velocity", c.slip_velocity);
  s.finish();
  return c;
}

reference::TrajectorySpec parse_trajectory(YAML::Node node, int n) {
  if (!node) throw ConfigError("trajectory section is required");
  Section s(node, "trajectory");
  reference::TrajectorySpec spec;
  spec.horizon = s.number("horizon", spec.horizon);
  const YAML::Node joints = s.child("joints");
  if (!joints || !joints.IsSequence()) throw ConfigError("trajectory.joints must be a list");
  if (static_cast<int>(joints.size()) != n) {
    throw ConfigError("trajectory.joints must have " + std::to_string(n) + " entries, got " +
                      std::to_string(joints.size()));
  }
  for (std::size_t i = 0; i < joints.size(); ++i) {
    Section j(joints[i], indexed("trajectory.joints", i));
    reference::JointTrajectory jt;
    const std::string kind = j.text("kind", "constant");
    if (kind == "constant") {
      jt.kind = reference::JointTrajectory::Kind::kConstant;
    } else if (kind == "sinusoid") {
      jt.kind = reference::JointTrajectory::Kind::kSinusoid;
    } else if (kind == "smoothed_sinusoid") {
      jt.kind = reference::JointTrajectory::Kind::kSmoothedSinusoid;
    } else {
      throw ConfigError(j.field("kind") + " must be constant, sinusoid or smoothed_sinusoid");
    }
    jt.amplitude = j.number("amplitude", 0.0);
    jt.omega = j.number("omega", 0.0);
    j.finish();
    spec.joints.push_back(jt);
  }
  s.finish();
  return spec;
}

Matrix parse_inertia_estimate(Section& s, const std::string& key, int n) {
  if (!s.has(key)) return Matrix::Identity(n, n);
  const YAML::Node node = s.child(key);
  const std::string name = s.field(key);
  if (node.IsSequence() && node.size() > 0 && node[0].IsSequence()) {
    if (static_cast<int>(node.size()) != n) {
      throw ConfigError(name + " must have " + std::to_string(n) + " rows");
    }
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) m.row(r) = Section::as_vector(node[r], indexed(name, r), n);
    return m;
  }
  return Section::as_vector(node, name, n).asDiagonal();
}

sim::ControllerConfig parse_controller(YAML::Node ctrl_node, YAML::Node est_node, int n) {
  if (!ctrl_node) throw ConfigError("controller section is required");
  Section s(ctrl_node, "controller");
  sim::ControllerConfig c;
  c.kind = sim::controller_kind_from_string(s.text("type", "rabic"));
  if (s.has("pd")) {
    Section pd(s.child("pd"), "controller.pd");
    control::PdGains g;
    g.kp = pd.vector("kp", n, std::nullopt);
    g.kd = pd.vector("kd", n, std::nullopt);
    pd.finish();
    c.pd = g;
  }
  if (s.has("rabic")) {
    Section r(s.child("rabic"), "controller.rabic");
    sim::RabicConfig rc;
    rc.gains.k1 = r.vector("k1", n, std::nullopt);
    rc.gains.k2 = r.vector("k2", n, std::nullopt);
    rc.gains.l = r.number("l", rc.gains.l);
    rc.gains.mu = r.vector("mu", n, 1.0);
    rc.gains.D_hat = parse_inertia_estimate(r, "D_hat", n);
    rc.gains.sign_smoothing_eps = r.number("sign_smoothing_eps", rc.gains.sign_smoothing_eps);
    rc.gains.xi1_guard_eps = r.number("xi1_guard_eps", rc.gains.xi1_guard_eps);
    Section imp(r.child("impedance"), "controller.rabic.impedance");
    rc.impedance.inertia = imp.vector("inertia", n, 1.0);
    rc.impedance.damping = imp.vector("damping", n, 20.0);
    rc.impedance.stiffness = imp.vector("stiffness", n, 1.0);
    rc.impedance.tau_d = imp.vector("tau_d", n, 0.0);
    imp.finish();
    r.finish();

    Section e(est_node, "estimator");
    const estimator::AdaptationRates defaults;
    rc.estimator.integral_order = e.integer("integral_order", 1);
    rc.estimator.direct_order = e.integer("direct_order", 1);
    rc.estimator.rho_phi = e.vector("rho_phi", n, defaults.rho_phi);
    rc.estimator.sigma_phi = e.vector("sigma_phi", n, defaults.sigma_phi);
    rc.estimator.rho_psi = e.vector("rho_psi", n, defaults.rho_psi);
    rc.estimator.sigma_psi = e.vector("sigma_psi", n, defaults.sigma_psi);
    e.finish();
    c.rabic = rc;
  } else if (est_node && !est_node.IsNull()) {
    throw ConfigError("estimator section requires controller.rabic");
  }
  s.finish();
  return c;
}

dynamics::DisturbanceSpec parse_disturbance(YAML::Node node, int n) {
  Section s(node, "disturbance");
  dynamics::DisturbanceSpec d;
  d.wrench_noise_std = s.number("wrench_noise_std", 0.0);
  const YAML::Node joints = s.child("joints");
  if (joints && !joints.IsNull()) {
    if (!joints.IsSequence() || static_cast<int>(joints.size()) != n) {
      throw ConfigError("disturbance.joints must be a list with " + std::to_string(n) + " entries");
    }
    for (std::size_t i = 0; i < joints.size(); ++i) {
      Section j(joints[i], indexed("disturbance.joints", i));
      dynamics::TorqueSignal sig;
      const std::string kind = j.text("kind", "zero");
      if (kind == "zero") {
        sig.kind = dynamics::TorqueSignal::Kind::kZero;
      } else if (kind == "constant") {
        sig.kind = dynamics::TorqueSignal::Kind::kConstant;
      } else if (kind == "sinusoid") {
        sig.kind = dynamics::TorqueSignal::Kind::kSinusoid;
      } else {
        throw ConfigError(j.field("kind") + " must be zero, constant or sinusoid");
      }
      sig.amplitude = j.number("amplitude", 0.0);
      sig.frequency_hz = j.number("frequency_hz", 0.0);
      sig.phase = j.number("phase", 0.0);
      j.finish();
      d.joints.push_back(sig);
    }
  }
  s.finish();
  return d;
}

sim::ScenarioConfig parse_node(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("scenario must be a YAML mapping");
  Section top(root, "");
  sim::ScenarioConfig cfg;
  cfg.name = top.text("name", cfg.name);
  cfg.robot = parse_robot(top.child("robot"));
  const int n = cfg.dofs();
  if (top.has("contact")) cfg.contact = parse_contact(top.child("contact"));
  cfg.trajectory = parse_trajectory(top.child("trajectory"), n);
  cfg.controller = parse_controller(top.child("controller"), top.child("estimator"), n);
  cfg.disturbance = parse_disturbance(top.child("disturbance"), n);
  Section s(top.child("sim"), "sim");
  cfg.duration = s.number("duration", cfg.duration);
  cfg.dt = s.number("dt", cfg.dt);
  cfg.seed = s.unsigned_integer("seed", cfg.seed);
  cfg.initial_theta = s.free_vector("initial_theta");
  cfg.initial_theta_dot = s.free_vector("initial_theta_dot");
  cfg.initial_base_position = as_point(s, "initial_base_position", cfg.initial_base_position);
  s.finish();
  top.finish();
  cfg.validate();
  return cfg;
}

// ---- canonical dump ----

YAML::Node num(double v) { return YAML::Node(fmt::format("{}", v)); }

YAML::Node list(const Vector& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (Eigen::Index i = 0; i < v.size(); ++i) n.push_back(num(v(i)));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

YAML::Node point(const dynamics::Vector2& v) { return list(Vector(v)); }

YAML::Node robot_node(const dynamics::RobotParams& p) {
  YAML::Node r;
  r["gravity"] = num(p.gravity);
  r["in_plane_gravity"] = p.in_plane_gravity;
  if (p.base) {
    YAML::Node b;
    b["wheel_radius"] = num(p.base->wheel_radius);
    b["half_track"] = num(p.base->half_track);
    b["chassis_mass"] = num(p.base->chassis_mass);
    b["chassis_inertia"] = num(p.base->chassis_inertia);
    b["mount_offset"] = num(p.base->mount_offset);
    r["base"] = b;
  }
  YAML::Node links(YAML::NodeType::Sequence);
  for (const auto& l : p.links) {
    YAML::Node ln;
    ln["mass"] = num(l.mass);
    ln["length"] = num(l.length);
    ln["com"] = num(l.com);
    ln["inertia"] = num(l.inertia);
    ln.SetStyle(YAML::EmitterStyle::Flow);
    links.push_back(ln);
  }
  r["links"] = links;
  const int n = static_cast<int>(p.links.size()) + (p.base ? 2 : 0);
  Vector friction = Vector::Zero(n);
  for (std::size_t i = 0; i < p.friction.size() && static_cast<int>(i) < n; ++i) {
    friction(static_cast<Eigen::Index>(i)) = p.friction[i];
  }
  r["friction"] = list(friction);
  return r;
}

YAML::Node contact_node(const dynamics::ContactModel& c) {
  YAML::Node n;
  n["shape"] = c.shape == dynamics::ObstacleShape::kBox ? "box" : "wall";
  n["center"] = point(c.center);
  n["half_extents"] = point(c.half_extents);
  n["normal"] = point(c.normal);
  n["stiffness"] = num(c.stiffness);
  n["damping"] = num(c.damping);
  n["friction"] = num(c.friction);
  n["ground_friction"] = num(c.ground_friction);
  n["mass"] = num(c.mass);
  n["pushable"] = c.pushable;
  n["slip_velocity"] = num(c.slip_velocity);
  return n;
}

YAML::Node trajectory_node(const reference::TrajectorySpec& t) {
  YAML::Node n;
  n["horizon"] = num(t.horizon);
  YAML::Node joints(YAML::NodeType::Sequence);
  for (const auto& j : t.joints) {
    YAML::Node jn;
    switch (j.kind) {
      case reference::JointTrajectory::Kind::kConstant:
        jn["kind"] = "constant";
        break;
      case reference::JointTrajectory::Kind::kSinusoid:
        jn["kind"] = "sinusoid";
        break;
      case reference::JointTrajectory::Kind::kSmoothedSinusoid:
        jn["kind"] = "smoothed_sinusoid";
        break;
    }
    jn["amplitude"] = num(j.amplitude);
    jn["omega"] = num(j.omega);
    jn.SetStyle(YAML::EmitterStyle::Flow);
    joints.push_back(jn);
  }
  n["joints"] = joints;
  return n;
}

YAML::Node geometry_node(const sim::ScenarioConfig& cfg) {
  YAML::Node root;
  root["robot"] = robot_node(cfg.robot);
  if (cfg.contact) root["contact"] = contact_node(*cfg.contact);
  root["trajectory"] = trajectory_node(cfg.trajectory);
  YAML::Node s;
  s["duration"] = num(cfg.duration);
  s["dt"] = num(cfg.dt);
  root["sim"] = s;
  return root;
}

YAML::Node scenario_node(const sim::ScenarioConfig& cfg) {
  YAML::Node root;
  root["name"] = cfg.name;
  root["robot"] = robot_node(cfg.robot);
  if (cfg.contact) root["contact"] = contact_node(*cfg.contact);
  root["trajectory"] = trajectory_node(cfg.trajectory);

  YAML::Node ctrl;
  ctrl["type"] = sim::to_string(cfg.controller.kind);
  if (cfg.controller.pd) {
    ctrl["pd"]["kp"] = list(cfg.controller.pd->kp);
    ctrl["pd"]["kd"] = list(cfg.controller.pd->kd);
  }
  if (cfg.controller.rabic) {
    const auto& rc = *cfg.controller.rabic;
    YAML::Node r;
    r["k1"] = list(rc.gains.k1);
    r["k2"] = list(rc.gains.k2);
    r["l"] = num(rc.gains.l);
    r["mu"] = list(rc.gains.mu);
    if (rc.gains.D_hat.isDiagonal(0.0)) {
      r["D_hat"] = list(rc.gains.D_hat.diagonal());
    } else {
      YAML::Node rows(YAML::NodeType::Sequence);
      for (Eigen::Index i = 0; i < rc.gains.D_hat.rows(); ++i) {
        rows.push_back(list(rc.gains.D_hat.row(i).transpose()));
      }
      r["D_hat"] = rows;
    }
    r["sign_smoothing_eps"] = num(rc.gains.sign_smoothing_eps);
    r["xi1_guard_eps"] = num(rc.gains.xi1_guard_eps);
    r["impedance"]["inertia"] = list(rc.impedance.inertia);
    r["impedance"]["damping"] = list(rc.impedance.damping);
    r["impedance"]["stiffness"] = list(rc.impedance.stiffness);
    r["impedance"]["tau_d"] = list(rc.impedance.tau_d);
    ctrl["rabic"] = r;
  }
  root["controller"] = ctrl;

  if (cfg.controller.rabic) {
    const auto& e = cfg.controller.rabic->estimator;
    YAML::Node est;
    est["integral_order"] = e.integral_order;
    est["direct_order"] = e.direct_order;
    est["rho_phi"] = list(e.rho_phi);
    est["sigma_phi"] = list(e.sigma_phi);
    est["rho_psi"] = list(e.rho_psi);
    est["sigma_psi"] = list(e.sigma_psi);
    root["estimator"] = est;
  }

  YAML::Node dist;
  dist["wrench_noise_std"] = num(cfg.disturbance.wrench_noise_std);
  if (!cfg.disturbance.joints.empty()) {
    YAML::Node joints(YAML::NodeType::Sequence);
    for (const auto& sig : cfg.disturbance.joints) {
      YAML::Node jn;
      switch (sig.kind) {
        case dynamics::TorqueSignal::Kind::kZero:
          jn["kind"] = "zero";
          break;
        case dynamics::TorqueSignal::Kind::kConstant:
          jn["kind"] = "constant";
          break;
        case dynamics::TorqueSignal::Kind::kSinusoid:
          jn["kind"] = "sinusoid";
          break;
      }
      jn["amplitude"] = num(sig.amplitude);
      jn["frequency_hz"] = num(sig.frequency_hz);
      jn["phase"] = num(sig.phase);
      jn.SetStyle(YAML::EmitterStyle::Flow);
      joints.push_back(jn);
    }
    dist["joints"] = joints;
  }
  root["disturbance"] = dist;

  YAML::Node s;
  s["duration"] = num(cfg.duration);
  s["dt"] = num(cfg.dt);
  s["seed"] = cfg.seed;
  if (cfg.initial_theta.size()) s["initial_theta"] = list(cfg.initial_theta);
  if (cfg.initial_theta_dot.size()) s["initial_theta_dot"] = list(cfg.initial_theta_dot);
  s["initial_base_position"] = point(cfg.initial_base_position);
  root["sim"] = s;
  return root;
}

std::string emit(const YAML::Node& node) {
  YAML::Emitter out;
  out << node;
  return std::string(out.c_str()) + "\n";
}

std::string fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
}

}  // namespace

sim::ScenarioConfig parse_scenario(std::string_view yaml_text) {
  return parse_node(load_yaml(yaml_text));
}

std::string dump_scenario(const sim::ScenarioConfig& cfg) { return emit(scenario_node(cfg)); }

sim::ScenarioConfig load_scenario(const std::string& path) {
  namespace fs = std::filesystem;
  for (const fs::path& candidate : {fs::path(path), fs::path(path + ".yaml")}) {
    std::error_code ec;
    if (!fs::is_regular_file(candidate, ec)) continue;
    std::ifstream in(candidate);
    if (!in) throw ConfigError("cannot read " + candidate.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
  }
  const std::string name = fs::path(path).stem().string();
  for (const Preset& p : presets()) {
    if (p.name == name) return parse_scenario(p.yaml);
  }
  throw ConfigError("config not found: " + path);
}

sim::ScenarioConfig with_parameter(const sim::ScenarioConfig& cfg, const std::string& path,
                                   double value) {
  YAML::Node root = scenario_node(cfg);
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty parameter path");

  // Walk with fresh handles: assigning through a yaml-cpp handle rebinds it.
  std::vector<YAML::Node> chain{root};
  for (const std::string& part : parts) {
    const YAML::Node& cur = chain.back();
    YAML::Node next;
    if (cur.IsMap() && cur[part]) {
      next = cur[part];
    } else if (cur.IsSequence() && !part.empty() &&
               std::all_of(part.begin(), part.end(), ::isdigit)) {
      const std::size_t idx = std::stoul(part);
      if (idx >= cur.size()) throw ConfigError("parameter path index out of range: " + path);
      next = cur[idx];
    } else {
      throw ConfigError("parameter path does not resolve: " + path);
    }
    chain.push_back(next);
  }
  YAML::Node target = chain.back();
  if (target.IsSequence()) {
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (!target[i].IsScalar()) throw ConfigError("parameter path is not numeric: " + path);
      target[i] = fmt::format("{}", value);
    }
  } else if (target.IsScalar()) {
    target = fmt::format("{}", value);
  } else {
    throw ConfigError("parameter path is not numeric: " + path);
  }
  return parse_node(root);
}

std::string config_hash(const sim::ScenarioConfig& cfg) { return fnv1a(dump_scenario(cfg)); }

std::string geometry_hash(const sim::ScenarioConfig& cfg) {
  return fnv1a(emit(geometry_node(cfg)));
}

}  // namespace rabic::config
