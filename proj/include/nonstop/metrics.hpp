#pragma once

#include <string>
#include <vector>

#include "nonstop/simulator.hpp"

namespace nonstop {

struct CarrierMetrics {
  double min_desired_speed = 0.0;    // commanded ||v_d|| [m/s]
  double min_realized_speed = 0.0;   // simulated ||v|| [m/s]
  double min_predicted_speed = 0.0;  // velocity-floor prediction [m/s]
  double min_tension = 0.0;          // realized [N]
  double max_tension = 0.0;
};

// Summary statistics of one run. Quantities that are undefined for the
// trace (no records, no move or final hold segment) are NaN.
struct MetricsReport {
  int ticks = 0;
  double simulated_time = 0.0;
  double mean_position_error = 0.0;
  double max_position_error = 0.0;
  double mean_attitude_error = 0.0;
  double max_attitude_error = 0.0;
  double final_position_error = 0.0;
  double final_attitude_error = 0.0;
  double final_hold_start_position_error = 0.0;  // first tick of a trailing hold
  double min_desired_speed = 0.0;
  double min_realized_speed = 0.0;
  double min_predicted_speed = 0.0;
  double min_desired_speed_deceleration = 0.0;  // second half of every move
  double negative_margin_fraction = 0.0;        // ticks with any margin < 0
  double min_tension = 0.0;
  double max_tension = 0.0;
  int optimizer_runs = 0;
  int fallback_count = 0;
  std::vector<CarrierMetrics> carriers;
};

MetricsReport compute_metrics(const SimTrace& trace, const TrajectoryPlan& trajectory);

}  // namespace nonstop
