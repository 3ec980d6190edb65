#include "nonstop/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>
#include <utility>

#include "nonstop/error.hpp"

namespace nonstop {

namespace {

std::string where(const YAML::Node& node, const std::string& source) {
  const YAML::Mark mark = node.Mark();
  std::ostringstream os;
  os << source;
  if (mark.line >= 0) {
    os << ':' << mark.line + 1 << ':' << mark.column + 1;
  } else {
    os << " (override)";
  }
  return os.str();
}

class MapReader {
 public:
  MapReader(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      fail(node_, path_.empty() ? "document" : path_, "expected a mapping");
    }
  }

  bool has(const char* key) const { return node_.IsMap() && node_[key]; }

  YAML::Node take(const char* key) {
    used_.insert(key);
    if (!node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
  }

  MapReader child(const char* key) { return MapReader(take(key), field(key), source_); }

  void read(const char* key, double& out) {
    if (auto n = take(key)) out = to_double(n, field(key));
  }
  void read(const char* key, int& out) {
    if (auto n = take(key)) out = to_int(n, field(key));
  }
  void read(const char* key, bool& out) {
    if (auto n = take(key)) {
      if (!n.IsScalar()) fail(n, field(key), "expected true or false");
      bool value = false;
      if (!YAML::convert<bool>::decode(n, value)) fail(n, field(key), "expected true or false");
      out = value;
    }
  }
  void read(const char* key, std::string& out) {
    if (auto n = take(key)) {
      if (!n.IsScalar()) fail(n, field(key), "expected a string");
      out = n.Scalar();
    }
  }
  void read(const char* key, Vec3& out) {
    if (auto n = take(key)) out = to_vec3(n, field(key));
  }
  void read(const char* key, Mat3& out) {
    if (auto n = take(key)) {
      if (!n.IsSequence() || n.size() != 3) fail(n, field(key), "expected 3 rows of 3 numbers");
      for (std::size_t r = 0; r < 3; ++r) {
        out.row(static_cast<Eigen::Index>(r)) =
            to_vec3(n[r], field(key) + "[" + std::to_string(r) + "]").transpose();
      }
    }
  }
  void read(const char* key, std::vector<double>& out) {
    if (auto n = take(key)) {
      auto items = sequence(n, field(key));
      out.clear();
      for (std::size_t i = 0; i < items.size(); ++i) {
        out.push_back(to_double(items[i], field(key) + "[" + std::to_string(i) + "]"));
      }
    }
  }
  void read(const char* key, std::vector<int>& out) {
    if (auto n = take(key)) {
      auto items = sequence(n, field(key));
      out.clear();
      for (std::size_t i = 0; i < items.size(); ++i) {
        out.push_back(to_int(items[i], field(key) + "[" + std::to_string(i) + "]"));
      }
    }
  }

  std::vector<YAML::Node> sequence(const YAML::Node& n, const std::string& name) const {
    if (!n.IsSequence()) fail(n, name, "expected a sequence");
    std::vector<YAML::Node> items;
    for (const auto& item : n) items.push_back(item);
    return items;
  }

  Vec3 to_vec3(const YAML::Node& n, const std::string& name) const {
    if (!n.IsSequence() || n.size() != 3) fail(n, name, "expected 3 numbers");
    return Vec3(to_double(n[0], name + "[0]"), to_double(n[1], name + "[1]"),
                to_double(n[2], name + "[2]"));
  }

  double to_double(const YAML::Node& n, const std::string& name) const {
    double value = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, value)) {
      fail(n, name, "expected a number");
    }
    return value;
  }

  int to_int(const YAML::Node& n, const std::string& name) const {
    int value = 0;
    if (!n.IsScalar() || !YAML::convert<int>::decode(n, value)) {
      fail(n, name, "expected an integer");
    }
    return value;
  }

  const std::string& source() const { return source_; }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  // Rejects keys that were never asked for.
  void finish() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!used_.count(key)) fail(kv.first, field(key), "unknown key");
    }
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& name, const std::string& what) const {
    throw Error(ErrorCode::kParse, where(n, source_) + ": field '" + name + "': " + what);
  }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

template <class Enum>
Enum read_enum(MapReader& m, const char* key, Enum current,
               const std::vector<std::pair<std::string, Enum>>& names) {
  std::string text;
  for (const auto& [name, value] : names) {
    if (value == current) text = name;
  }
  auto node = m.take(key);
  if (!node) return current;
  if (!node.IsScalar()) m.fail(node, m.field(key), "expected a string");
  for (const auto& [name, value] : names) {
    if (node.Scalar() == name) return value;
  }
  std::string allowed;
  for (const auto& entry : names) allowed += (allowed.empty() ? "" : ", ") + entry.first;
  m.fail(node, m.field(key), "expected one of: " + allowed);
}

const std::vector<std::pair<std::string, CarrierModel::Mode>> kCarrierModes = {
    {"point_mass_pd", CarrierModel::Mode::kPointMassPd},
    {"kinematic", CarrierModel::Mode::kKinematic}};
const std::vector<std::pair<std::string, BasisOrientation>> kBasisNames = {
    {"circulating", BasisOrientation::kCirculating}, {"svd", BasisOrientation::kSvd}};

void decode_geometry(MapReader m, ScenarioConfig& c, double rest_length) {
  int carriers = c.geometry.count();
  double radius = 0.3;
  double carrier_mass = c.geometry.carrier_masses.empty() ? 0.01 : c.geometry.carrier_masses[0];
  std::vector<double> carrier_masses;
  std::vector<Vec3> attachments;
  auto& g = c.geometry;
  m.read("carriers", carriers);
  m.read("attachment_radius", radius);
  m.read("load_mass", g.load_mass);
  m.read("load_inertia", g.load_inertia);
  m.read("carrier_mass", carrier_mass);
  m.read("carrier_masses", carrier_masses);
  m.read("gravity", g.gravity);
  if (auto node = m.take("attachments")) {
    auto items = m.sequence(node, m.field("attachments"));
    for (std::size_t i = 0; i < items.size(); ++i) {
      attachments.push_back(m.to_vec3(items[i], m.field("attachments") + "[" + std::to_string(i) + "]"));
    }
    if (m.has("carriers") && carriers != static_cast<int>(attachments.size())) {
      throw Error(ErrorCode::kValidation,
                  "geometry.carriers disagrees with the number of geometry.attachments");
    }
  } else {
    if (carriers < 3) {
      throw Error(ErrorCode::kValidation, "geometry.carriers must be at least 3 (got " +
                                              std::to_string(carriers) + ")");
    }
    if (!(radius > 0.0)) throw Error(ErrorCode::kValidation, "geometry.attachment_radius must be positive");
    attachments = make_polygon_geometry(carriers, radius, 1.0, 1.0, Mat3::Identity(), 1.0).attachments;
  }
  m.finish();
  const std::size_t n = attachments.size();
  if (carrier_masses.empty()) {
    carrier_masses.assign(n, carrier_mass);
  } else if (carrier_masses.size() != n) {
    throw Error(ErrorCode::kValidation, "geometry.carrier_masses needs one entry per carrier");
  }
  g.attachments = std::move(attachments);
  g.carrier_masses = std::move(carrier_masses);
  g.cable_lengths.assign(n, rest_length);
}

void decode_trajectory(MapReader m, TrajectoryPlan& plan) {
  m.read("initial_position", plan.initial_position);
  m.read("attitude", plan.attitude);
  if (auto node = m.take("segments")) {
    plan.segments.clear();
    auto items = m.sequence(node, m.field("segments"));
    for (std::size_t i = 0; i < items.size(); ++i) {
      MapReader seg(items[i], m.field("segments") + "[" + std::to_string(i) + "]", m.source());
      std::string kind;
      seg.read("kind", kind);
      TrajectorySegment segment;
      seg.read("duration", segment.duration);
      if (kind == "hold") {
        segment.kind = TrajectorySegment::Kind::kHold;
      } else if (kind == "move") {
        segment.kind = TrajectorySegment::Kind::kMove;
        if (!seg.has("target")) seg.fail(items[i], seg.field("target"), "a move segment needs a target");
        seg.read("target", segment.target);
      } else {
        seg.fail(items[i], seg.field("kind"), "expected 'hold' or 'move'");
      }
      seg.finish();
      plan.segments.push_back(segment);
    }
  }
  m.finish();
}

ScenarioConfig decode(const YAML::Node& root, const std::string& source) {
  ScenarioConfig c;
  MapReader top(root, "", source);
  top.read("name", c.name);
  top.read("epsilon", c.epsilon);

  {
    MapReader m = top.child("cable");
    m.read("rest_length", c.cable.rest_length);
    m.read("stiffness", c.cable.stiffness);
    m.read("damping", c.cable.damping);
    m.read("unilateral", c.cable.unilateral);
    m.finish();
  }
  decode_geometry(top.child("geometry"), c, c.cable.rest_length);
  {
    MapReader m = top.child("load");
    m.read("damping", c.load_damping);
    m.read("angular_damping", c.load_angular_damping);
    m.finish();
  }
  {
    MapReader m = top.child("carrier");
    c.carrier.mode = read_enum(m, "mode", c.carrier.mode, kCarrierModes);
    m.read("kp", c.carrier.kp);
    m.read("kd", c.carrier.kd);
    m.finish();
  }
  {
    MapReader m = top.child("controller");
    m.read("kp", c.gains.kp);
    m.read("kv", c.gains.kv);
    m.read("ki", c.gains.ki);
    m.read("kr", c.gains.kr);
    m.read("kw", c.gains.kw);
    m.read("kir", c.gains.kir);
    m.read("position_integral_limit", c.position_integral_limit);
    m.read("attitude_integral_limit", c.attitude_integral_limit);
    m.read("tension_floor", c.tension_floor);
    m.read("stretch_compensation", c.stretch_compensation);
    m.finish();
  }
  {
    auto& o = c.optimizer;
    MapReader m = top.child("optimizer");
    m.read("enabled", o.enabled);
    {
      MapReader init = m.child("initial");
      init.read("frequency", o.initial.frequency);
      init.read("amplitude", o.initial.amplitude);
      init.finish();
    }
    {
      MapReader b = m.child("bounds");
      std::vector<double> range;
      if (b.has("frequency")) {
        auto node = b.take("frequency");
        b.read("frequency", range);
        if (range.size() != 2) b.fail(node, b.field("frequency"), "expected [min, max]");
        o.bounds.frequency_min = range[0];
        o.bounds.frequency_max = range[1];
      }
      if (b.has("amplitude")) {
        auto node = b.take("amplitude");
        b.read("amplitude", range);
        if (range.size() != 2) b.fail(node, b.field("amplitude"), "expected [min, max]");
        o.bounds.amplitude_min = range[0];
        o.bounds.amplitude_max = range[1];
      }
      b.finish();
    }
    {
      MapReader w = m.child("weights");
      w.read("position", o.weights.position);
      w.read("velocity", o.weights.velocity);
      w.finish();
    }
    m.read("grid", o.settings.grid);
    m.read("polish_iterations", o.settings.polish_iterations);
    m.read("lookahead", o.settings.lookahead_samples);
    m.read("period", o.period);
    m.read("phases", o.phases);
    m.read("columns", o.columns);
    o.basis = read_enum(m, "basis", o.basis, kBasisNames);
    m.read("max_fallbacks", o.max_fallbacks);
    m.finish();
  }
  decode_trajectory(top.child("trajectory"), c.trajectory);
  {
    MapReader m = top.child("timing");
    m.read("physics_dt", c.timing.physics_dt);
    m.read("control_period", c.timing.control_period);
    c.timing.duration = c.trajectory.duration();
    m.read("duration", c.timing.duration);
    m.finish();
  }
  {
    MapReader m = top.child("output");
    m.read("plotdata", c.output.plotdata);
    m.finish();
  }
  top.finish();
  return c;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '.')) parts.push_back(part);
  return parts;
}

void assign_path(YAML::Node node, const std::vector<std::string>& path, std::size_t i,
                 const YAML::Node& value, const std::string& text) {
  const std::string& key = path[i];
  const bool last = i + 1 == path.size();
  if (node.IsSequence()) {
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
    if (ec != std::errc() || ptr != key.data() + key.size() || index >= node.size()) {
      throw Error(ErrorCode::kParse, "override '" + text + "': '" + key + "' is not a valid index");
    }
    if (last) {
      node[index] = value;
    } else {
      assign_path(node[index], path, i + 1, value, text);
    }
    return;
  }
  if (last) {
    node[key] = value;
    return;
  }
  if (!node[key] || !(node[key].IsMap() || node[key].IsSequence())) {
    node[key] = YAML::Node(YAML::NodeType::Map);
  }
  assign_path(node[key], path, i + 1, value, text);
}

void apply_override(YAML::Node& root, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kParse, "override '" + text + "' must have the form key=value");
  }
  const auto path = split_path(text.substr(0, eq));
  for (const auto& part : path) {
    if (part.empty()) throw Error(ErrorCode::kParse, "override '" + text + "' has an empty key component");
  }
  YAML::Node value;
  try {
    value = YAML::Load(text.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParse, "override '" + text + "': " + e.msg);
  }
  if (!root.IsMap()) root = YAML::Node(YAML::NodeType::Map);
  assign_path(root, path, 0, value, text);
}

YAML::Node scalar(double v) { return YAML::Node(format_double(v)); }

YAML::Node flow(const Vec3& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (int i = 0; i < 3; ++i) n.push_back(scalar(v(i)));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

YAML::Node rows(const Mat3& m) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (int r = 0; r < 3; ++r) n.push_back(flow(m.row(r).transpose()));
  return n;
}

template <class T>
YAML::Node flow_list(const std::vector<T>& values) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (const T& v : values) {
    if constexpr (std::is_floating_point_v<T>) {
      n.push_back(scalar(v));
    } else {
      n.push_back(v);
    }
  }
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

template <class Enum>
std::string enum_name(Enum value, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "";
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return ".nan";
  if (std::isinf(value)) return value > 0 ? ".inf" : "-.inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string text(buf, res.ptr);
  if (text.find_first_of(".en") == std::string::npos) text += ".0";
  return text;
}

ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw Error(ErrorCode::kParse, os.str());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  ScenarioConfig config = decode(root, source);
  validate(config);
  return config;
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides, path);
}

std::string serialize_config(const ScenarioConfig& c) {
  YAML::Node root(YAML::NodeType::Map);
  root["name"] = c.name;

  YAML::Node geometry(YAML::NodeType::Map);
  YAML::Node attachments(YAML::NodeType::Sequence);
  for (const auto& b : c.geometry.attachments) attachments.push_back(flow(b));
  geometry["attachments"] = attachments;
  geometry["load_mass"] = scalar(c.geometry.load_mass);
  geometry["load_inertia"] = rows(c.geometry.load_inertia);
  geometry["carrier_masses"] = flow_list(c.geometry.carrier_masses);
  geometry["gravity"] = scalar(c.geometry.gravity);
  root["geometry"] = geometry;

  root["load"]["damping"] = scalar(c.load_damping);
  root["load"]["angular_damping"] = scalar(c.load_angular_damping);

  root["cable"]["rest_length"] = scalar(c.cable.rest_length);
  root["cable"]["stiffness"] = scalar(c.cable.stiffness);
  root["cable"]["damping"] = scalar(c.cable.damping);
  root["cable"]["unilateral"] = c.cable.unilateral;

  root["carrier"]["mode"] = enum_name(c.carrier.mode, kCarrierModes);
  root["carrier"]["kp"] = scalar(c.carrier.kp);
  root["carrier"]["kd"] = scalar(c.carrier.kd);

  YAML::Node ctl(YAML::NodeType::Map);
  ctl["kp"] = flow(c.gains.kp);
  ctl["kv"] = flow(c.gains.kv);
  ctl["ki"] = flow(c.gains.ki);
  ctl["kr"] = flow(c.gains.kr);
  ctl["kw"] = flow(c.gains.kw);
  ctl["kir"] = flow(c.gains.kir);
  ctl["position_integral_limit"] = scalar(c.position_integral_limit);
  ctl["attitude_integral_limit"] = scalar(c.attitude_integral_limit);
  ctl["tension_floor"] = scalar(c.tension_floor);
  ctl["stretch_compensation"] = c.stretch_compensation;
  root["controller"] = ctl;

  root["epsilon"] = scalar(c.epsilon);

  const auto& o = c.optimizer;
  YAML::Node opt(YAML::NodeType::Map);
  opt["enabled"] = o.enabled;
  opt["initial"]["frequency"] = scalar(o.initial.frequency);
  opt["initial"]["amplitude"] = scalar(o.initial.amplitude);
  opt["bounds"]["frequency"] = flow_list(std::vector<double>{o.bounds.frequency_min, o.bounds.frequency_max});
  opt["bounds"]["amplitude"] = flow_list(std::vector<double>{o.bounds.amplitude_min, o.bounds.amplitude_max});
  opt["weights"]["position"] = scalar(o.weights.position);
  opt["weights"]["velocity"] = scalar(o.weights.velocity);
  opt["grid"] = o.settings.grid;
  opt["polish_iterations"] = o.settings.polish_iterations;
  opt["lookahead"] = o.settings.lookahead_samples;
  opt["period"] = scalar(o.period);
  opt["phases"] = flow_list(o.phases);
  opt["columns"] = flow_list(o.columns);
  opt["basis"] = enum_name(o.basis, kBasisNames);
  opt["max_fallbacks"] = o.max_fallbacks;
  root["optimizer"] = opt;

  YAML::Node traj(YAML::NodeType::Map);
  traj["initial_position"] = flow(c.trajectory.initial_position);
  traj["attitude"] = rows(c.trajectory.attitude);
  YAML::Node segments(YAML::NodeType::Sequence);
  for (const auto& s : c.trajectory.segments) {
    YAML::Node seg(YAML::NodeType::Map);
    seg["kind"] = s.kind == TrajectorySegment::Kind::kHold ? "hold" : "move";
    seg["duration"] = scalar(s.duration);
    if (s.kind == TrajectorySegment::Kind::kMove) seg["target"] = flow(s.target);
    seg.SetStyle(YAML::EmitterStyle::Flow);
    segments.push_back(seg);
  }
  traj["segments"] = segments;
  root["trajectory"] = traj;

  root["timing"]["physics_dt"] = scalar(c.timing.physics_dt);
  root["timing"]["control_period"] = scalar(c.timing.control_period);
  root["timing"]["duration"] = scalar(c.timing.duration);

  root["output"]["plotdata"] = c.output.plotdata;

  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace nonstop
