#include "nonstop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace nonstop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_nan(double v) { return std::isfinite(v) ? v : kNaN; }

}  // namespace

MetricsReport compute_metrics(const SimTrace& trace, const TrajectoryPlan& trajectory) {
  MetricsReport m;
  const auto& records = trace.records;
  const int n = trace.carriers;
  m.ticks = static_cast<int>(records.size());
  m.optimizer_runs = trace.optimizer_runs;
  m.fallback_count = trace.fallback_count;
  m.carriers.assign(static_cast<std::size_t>(n), CarrierMetrics{kInf, kInf, kInf, kInf, -kInf});

  std::vector<std::pair<double, double>> deceleration;
  const auto windows = segment_windows(trajectory);
  for (const auto& w : windows) {
    if (w.kind == TrajectorySegment::Kind::kMove) deceleration.emplace_back(0.5 * (w.begin + w.end), w.end);
  }
  // Consecutive holds at the end count as one final hold.
  std::optional<double> final_hold_begin;
  for (auto it = windows.rbegin(); it != windows.rend(); ++it) {
    if (it->kind != TrajectorySegment::Kind::kHold) break;
    final_hold_begin = it->begin;
  }

  double sum_ep = 0.0, sum_er = 0.0;
  double max_ep = 0.0, max_er = 0.0;
  double min_decel = kInf;
  double hold_start = kNaN;
  int negative = 0;
  for (const auto& r : records) {
    const double ep = r.position_error.norm();
    const double er = r.attitude_error.norm();
    sum_ep += ep;
    sum_er += er;
    max_ep = std::max(max_ep, ep);
    max_er = std::max(max_er, er);
    if (final_hold_begin && std::isnan(hold_start) && r.t >= *final_hold_begin - 1e-9) hold_start = ep;
    bool in_decel = false;
    for (const auto& [b, e] : deceleration) in_decel = in_decel || (r.t >= b && r.t <= e);
    bool any_negative = false;
    for (int i = 0; i < n; ++i) {
      auto& c = m.carriers[static_cast<std::size_t>(i)];
      const double vd = r.desired_velocity[i].norm();
      c.min_desired_speed = std::min(c.min_desired_speed, vd);
      c.min_realized_speed = std::min(c.min_realized_speed, r.carrier_velocity[i].norm());
      c.min_predicted_speed = std::min(c.min_predicted_speed, r.predicted_velocity[i].norm());
      c.min_tension = std::min(c.min_tension, r.tension[i]);
      c.max_tension = std::max(c.max_tension, r.tension[i]);
      if (in_decel) min_decel = std::min(min_decel, vd);
      any_negative = any_negative || r.margin[i] < 0.0;
    }
    if (any_negative) ++negative;
  }

  if (records.empty()) {
    m.mean_position_error = m.max_position_error = kNaN;
    m.mean_attitude_error = m.max_attitude_error = kNaN;
    m.final_position_error = m.final_attitude_error = kNaN;
    m.negative_margin_fraction = kNaN;
    m.simulated_time = 0.0;
  } else {
    const double count = static_cast<double>(records.size());
    m.simulated_time = records.back().t;
    m.mean_position_error = sum_ep / count;
    m.mean_attitude_error = sum_er / count;
    m.max_position_error = max_ep;
    m.max_attitude_error = max_er;
    m.final_position_error = records.back().position_error.norm();
    m.final_attitude_error = records.back().attitude_error.norm();
    m.negative_margin_fraction = negative / count;
  }
  m.final_hold_start_position_error = hold_start;
  m.min_desired_speed_deceleration = finite_or_nan(min_decel);

  double min_d = kInf, min_r = kInf, min_p = kInf, min_t = kInf, max_t = -kInf;
  for (auto& c : m.carriers) {
    min_d = std::min(min_d, c.min_desired_speed);
    min_r = std::min(min_r, c.min_realized_speed);
    min_p = std::min(min_p, c.min_predicted_speed);
    min_t = std::min(min_t, c.min_tension);
    max_t = std::max(max_t, c.max_tension);
    c.min_desired_speed = finite_or_nan(c.min_desired_speed);
    c.min_realized_speed = finite_or_nan(c.min_realized_speed);
    c.min_predicted_speed = finite_or_nan(c.min_predicted_speed);
    c.min_tension = finite_or_nan(c.min_tension);
    c.max_tension = finite_or_nan(c.max_tension);
  }
  m.min_desired_speed = finite_or_nan(min_d);
  m.min_realized_speed = finite_or_nan(min_r);
  m.min_predicted_speed = finite_or_nan(min_p);
  m.min_tension = finite_or_nan(min_t);
  m.max_tension = finite_or_nan(max_t);
  return m;
}

}  // namespace nonstop
