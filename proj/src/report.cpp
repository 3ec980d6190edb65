#include "nonstop/report.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nonstop/config_io.hpp"
#include "nonstop/error.hpp"

#ifndef NONSTOP_VERSION
#define NONSTOP_VERSION "0.0.0"
#endif

namespace nonstop {

namespace fs = std::filesystem;

namespace {

class CsvRow {
 public:
  CsvRow& num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return text(buf);
  }
  CsvRow& vec(const Vec3& v) { return num(v.x()).num(v.y()).num(v.z()); }
  CsvRow& flag(bool b) { return text(b ? "1" : "0"); }
  CsvRow& text(const std::string& s) {
    if (!first_) out_ += ',';
    out_ += s;
    first_ = false;
    return *this;
  }
  CsvRow& names(const std::string& prefix, std::initializer_list<const char*> suffixes) {
    for (const char* s : suffixes) text(prefix + s);
    return *this;
  }
  std::string line() const { return out_ + "\n"; }

 private:
  std::string out_;
  bool first_ = true;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create directory '" + dir.string() + "': " + ec.message());
  }
}

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json yaml_to_json(const YAML::Node& node, bool keep_string = false) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json obj = nlohmann::json::object();
      for (const auto& kv : node) {
        const std::string key = kv.first.Scalar();
        obj[key] = yaml_to_json(kv.second, key == "name" || key == "mode" || key == "basis" ||
                                               key == "kind");
      }
      return obj;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (keep_string) return s;
      if (s == "true") return true;
      if (s == "false") return false;
      long long i = 0;
      if (s.find_first_of(".eEn") == std::string::npos && YAML::convert<long long>::decode(node, i)) {
        return i;
      }
      double d = 0.0;
      if (YAML::convert<double>::decode(node, d)) return number(d);
      return s;
    }
    default:
      return nullptr;
  }
}

std::string plot_desired(const SimTrace& trace) {
  std::string out = CsvRow().text("t").names("", {"x", "y", "z", "vx", "vy", "vz", "ax", "ay", "az"}).line();
  for (const auto& r : trace.records) {
    out += CsvRow().num(r.t).vec(r.reference.position).vec(r.reference.velocity)
               .vec(r.reference.acceleration).line();
  }
  return out;
}

std::string plot_load(const SimTrace& trace) {
  std::string out = CsvRow().text("t").names("", {"x", "y", "z", "x_d", "y_d", "z_d"}).line();
  for (const auto& r : trace.records) {
    out += CsvRow().num(r.t).vec(r.load.position).vec(r.reference.position).line();
  }
  return out;
}

std::string plot_carrier_paths(const SimTrace& trace) {
  CsvRow head;
  head.text("t");
  for (int i = 1; i <= trace.carriers; ++i) head.names("c" + std::to_string(i) + "_", {"x", "y", "z"});
  std::string out = head.line();
  for (const auto& r : trace.records) {
    CsvRow row;
    row.num(r.t);
    for (const auto& p : r.carrier_position) row.vec(p);
    out += row.line();
  }
  return out;
}

std::string plot_speeds(const SimTrace& trace) {
  CsvRow head;
  head.text("t");
  for (int i = 1; i <= trace.carriers; ++i) head.text("c" + std::to_string(i) + "_speed_d");
  for (int i = 1; i <= trace.carriers; ++i) head.text("c" + std::to_string(i) + "_speed");
  head.text("epsilon");
  std::string out = head.line();
  for (const auto& r : trace.records) {
    CsvRow row;
    row.num(r.t);
    for (const auto& v : r.desired_velocity) row.num(v.norm());
    for (const auto& v : r.carrier_velocity) row.num(v.norm());
    row.num(trace.epsilon);
    out += row.line();
  }
  return out;
}

std::string plot_errors(const SimTrace& trace) {
  std::string out = CsvRow().text("t").text("ep_norm").text("eR_norm").line();
  for (const auto& r : trace.records) {
    out += CsvRow().num(r.t).num(r.position_error.norm()).num(r.attitude_error.norm()).line();
  }
  return out;
}

std::string plot_tensions(const SimTrace& trace) {
  CsvRow head;
  head.text("t");
  for (int i = 1; i <= trace.carriers; ++i) head.text("c" + std::to_string(i) + "_T");
  for (int i = 1; i <= trace.carriers; ++i) head.text("c" + std::to_string(i) + "_Td");
  std::string out = head.line();
  for (const auto& r : trace.records) {
    CsvRow row;
    row.num(r.t);
    for (double t : r.tension) row.num(t);
    for (double t : r.desired_tension) row.num(t);
    out += row.line();
  }
  return out;
}

std::string plot_oscillation(const SimTrace& trace) {
  std::string out = CsvRow().text("t").text("xi").text("A").text("min_margin").line();
  for (const auto& r : trace.records) {
    double worst = std::numeric_limits<double>::infinity();
    for (double m : r.margin) worst = std::min(worst, m);
    out += CsvRow().num(r.t).num(r.x.frequency).num(r.x.amplitude).num(worst).line();
  }
  return out;
}

}  // namespace

const char* artifact_version() { return NONSTOP_VERSION; }

int exit_status(const SimTrace& trace) {
  if (!trace.aborted) return 0;
  return trace.abort_code == ErrorCode::kOptimizerFailure ? 4 : 3;
}

std::string trace_header(int carriers) {
  CsvRow h;
  h.text("t")
      .names("load_", {"x", "y", "z", "vx", "vy", "vz"})
      .names("load_r", {"11", "12", "13", "21", "22", "23", "31", "32", "33"})
      .names("load_w", {"x", "y", "z"})
      .names("ref_", {"x", "y", "z", "vx", "vy", "vz"})
      .names("ep_", {"x", "y", "z", "norm"})
      .names("eR_", {"x", "y", "z", "norm"})
      .names("wrench_", {"fx", "fy", "fz", "tx", "ty", "tz"})
      .names("", {"xi", "A", "opt_ran", "opt_feasible", "opt_fallback"});
  for (int i = 1; i <= carriers; ++i) {
    h.names("c" + std::to_string(i) + "_",
            {"x", "y", "z", "vx", "vy", "vz", "speed", "dx", "dy", "dz", "dvx", "dvy", "dvz",
             "dspeed", "pspeed", "T", "Td", "margin"});
  }
  return h.line();
}

std::string trace_csv(const SimTrace& trace) {
  std::string out = trace_header(trace.carriers);
  for (const auto& r : trace.records) {
    CsvRow row;
    row.num(r.t).vec(r.load.position).vec(r.load.velocity);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) row.num(r.load.attitude(a, b));
    }
    row.vec(r.load.angular_velocity).vec(r.reference.position).vec(r.reference.velocity);
    row.vec(r.position_error).num(r.position_error.norm());
    row.vec(r.attitude_error).num(r.attitude_error.norm());
    row.vec(r.wrench.head<3>()).vec(r.wrench.tail<3>());
    row.num(r.x.frequency).num(r.x.amplitude);
    row.flag(r.optimizer_ran).flag(r.optimizer_feasible).flag(r.fallback_used);
    for (int i = 0; i < trace.carriers; ++i) {
      row.vec(r.carrier_position[i]).vec(r.carrier_velocity[i]).num(r.carrier_velocity[i].norm());
      row.vec(r.desired_position[i]).vec(r.desired_velocity[i]).num(r.desired_velocity[i].norm());
      row.num(r.predicted_velocity[i].norm()).num(r.tension[i]).num(r.desired_tension[i]);
      row.num(r.margin[i]);
    }
    out += row.line();
  }
  return out;
}

nlohmann::json metrics_json(const MetricsReport& m) {
  nlohmann::json j;
  j["ticks"] = m.ticks;
  j["simulated_time"] = number(m.simulated_time);
  j["mean_position_error"] = number(m.mean_position_error);
  j["max_position_error"] = number(m.max_position_error);
  j["mean_attitude_error"] = number(m.mean_attitude_error);
  j["max_attitude_error"] = number(m.max_attitude_error);
  j["final_position_error"] = number(m.final_position_error);
  j["final_attitude_error"] = number(m.final_attitude_error);
  j["final_hold_start_position_error"] = number(m.final_hold_start_position_error);
  j["min_desired_speed"] = number(m.min_desired_speed);
  j["min_realized_speed"] = number(m.min_realized_speed);
  j["min_predicted_speed"] = number(m.min_predicted_speed);
  j["min_desired_speed_deceleration"] = number(m.min_desired_speed_deceleration);
  j["negative_margin_fraction"] = number(m.negative_margin_fraction);
  j["min_tension"] = number(m.min_tension);
  j["max_tension"] = number(m.max_tension);
  j["optimizer_runs"] = m.optimizer_runs;
  j["fallback_count"] = m.fallback_count;
  j["carriers"] = nlohmann::json::array();
  for (const auto& c : m.carriers) {
    j["carriers"].push_back({{"min_desired_speed", number(c.min_desired_speed)},
                             {"min_realized_speed", number(c.min_realized_speed)},
                             {"min_predicted_speed", number(c.min_predicted_speed)},
                             {"min_tension", number(c.min_tension)},
                             {"max_tension", number(c.max_tension)}});
  }
  return j;
}

nlohmann::json config_json(const ScenarioConfig& config) {
  return yaml_to_json(YAML::Load(serialize_config(config)));
}

nlohmann::json summary_json(const ScenarioConfig& config, const SimTrace& trace,
                            const MetricsReport& metrics) {
  nlohmann::json j;
  j["artifact"] = {{"name", "nonstop"}, {"version", artifact_version()}};
  j["scenario"] = config.name;
  j["status"] = trace.aborted ? "aborted" : "completed";
  j["exit_code"] = exit_status(trace);
  if (trace.aborted) {
    j["abort"] = {{"code", trace.abort_code ? error_code_name(*trace.abort_code) : "unknown"},
                  {"reason", trace.abort_reason}};
  } else {
    j["abort"] = nullptr;
  }
  j["epsilon"] = config.epsilon;
  j["optimizer_enabled"] = config.optimizer.enabled;
  j["metrics"] = metrics_json(metrics);
  j["config"] = config_json(config);
  return j;
}

void write_run(const std::string& dir, const ScenarioConfig& config, const SimTrace& trace,
               const MetricsReport& metrics) {
  const fs::path root(dir);
  make_dir(root);
  write_file(root / "trace.csv", trace_csv(trace));
  write_file(root / "summary.json", summary_json(config, trace, metrics).dump(2) + "\n");
  if (!config.output.plotdata) return;
  const fs::path plots = root / "plotdata";
  make_dir(plots);
  write_file(plots / "desired_trajectory.csv", plot_desired(trace));
  write_file(plots / "load_position.csv", plot_load(trace));
  write_file(plots / "carrier_paths.csv", plot_carrier_paths(trace));
  write_file(plots / "carrier_speeds.csv", plot_speeds(trace));
  write_file(plots / "tracking_errors.csv", plot_errors(trace));
  write_file(plots / "tensions.csv", plot_tensions(trace));
  write_file(plots / "oscillation.csv", plot_oscillation(trace));
}

Comparison run_comparison(const ScenarioConfig& config) {
  Comparison c;
  c.off_config = config;
  c.off_config.optimizer.enabled = false;
  c.on_config = config;
  c.on_config.optimizer.enabled = true;
  validate(c.off_config);
  validate(c.on_config);
  c.off = run_closed_loop(c.off_config);
  c.on = run_closed_loop(c.on_config);
  c.off_metrics = compute_metrics(c.off, c.off_config.trajectory);
  c.on_metrics = compute_metrics(c.on, c.on_config.trajectory);
  return c;
}

nlohmann::json comparison_json(const Comparison& c) {
  nlohmann::json j;
  j["artifact"] = {{"name", "nonstop"}, {"version", artifact_version()}};
  j["scenario"] = c.on_config.name;
  j["off"] = {{"status", c.off.aborted ? "aborted" : "completed"},
              {"metrics", metrics_json(c.off_metrics)}};
  j["on"] = {{"status", c.on.aborted ? "aborted" : "completed"},
             {"metrics", metrics_json(c.on_metrics)}};
  j["delta"] = {
      {"mean_position_error", number(c.on_metrics.mean_position_error - c.off_metrics.mean_position_error)},
      {"min_desired_speed", number(c.on_metrics.min_desired_speed - c.off_metrics.min_desired_speed)}};
  return j;
}

std::string comparison_table(const Comparison& c) {
  struct Line {
    const char* label;
    double off;
    double on;
    bool delta;
  };
  const auto& a = c.off_metrics;
  const auto& b = c.on_metrics;
  const Line lines[] = {
      {"mean |e_p| [m]", a.mean_position_error, b.mean_position_error, true},
      {"max |e_p| [m]", a.max_position_error, b.max_position_error, false},
      {"mean |e_R|", a.mean_attitude_error, b.mean_attitude_error, false},
      {"max |e_R|", a.max_attitude_error, b.max_attitude_error, false},
      {"final |e_p| [m]", a.final_position_error, b.final_position_error, false},
      {"min |v_d| [m/s]", a.min_desired_speed, b.min_desired_speed, true},
      {"min |v| realized [m/s]", a.min_realized_speed, b.min_realized_speed, false},
      {"negative margin fraction", a.negative_margin_fraction, b.negative_margin_fraction, false},
      {"min tension [N]", a.min_tension, b.min_tension, false},
      {"max tension [N]", a.max_tension, b.max_tension, false},
  };
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-26s %14s %14s %14s\n", "metric", "optimizer off", "optimizer on",
                "delta");
  os << buf;
  for (const auto& l : lines) {
    if (l.delta) {
      std::snprintf(buf, sizeof buf, "%-26s %14.6g %14.6g %14.6g\n", l.label, l.off, l.on, l.on - l.off);
    } else {
      std::snprintf(buf, sizeof buf, "%-26s %14.6g %14.6g %14s\n", l.label, l.off, l.on, "");
    }
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%-26s %14d %14d\n", "optimizer fallbacks", a.fallback_count,
                b.fallback_count);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-26s %14s %14s\n", "status", c.off.aborted ? "aborted" : "completed",
                c.on.aborted ? "aborted" : "completed");
  os << buf;
  return os.str();
}

void write_comparison(const std::string& dir, const Comparison& c) {
  const fs::path root(dir);
  make_dir(root);
  write_run((root / "off").string(), c.off_config, c.off, c.off_metrics);
  write_run((root / "on").string(), c.on_config, c.on, c.on_metrics);
  write_file(root / "comparison.json", comparison_json(c).dump(2) + "\n");
  write_file(root / "comparison.txt", comparison_table(c));
}

}  // namespace nonstop
