#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "nonstop/metrics.hpp"

namespace nonstop {

const char* artifact_version();

// Process exit status for a finished run: 0, 3 (aborted) or 4 (aborted
// because the optimizer fallback budget ran out).
int exit_status(const SimTrace& trace);

// trace.csv: header line, then one row per control tick with every number
// printed with 9 significant digits. Column names for n carriers:
//   t, load_{x,y,z}, load_v{x,y,z}, load_r{11..33} (row major),
//   load_w{x,y,z}, ref_{x,y,z}, ref_v{x,y,z}, ep_{x,y,z}, ep_norm,
//   eR_{x,y,z}, eR_norm, wrench_f{x,y,z}, wrench_t{x,y,z}, xi, A,
//   opt_ran, opt_feasible, opt_fallback,
// followed per carrier i = 1..n by
//   c<i>_{x,y,z}, c<i>_v{x,y,z}, c<i>_speed, c<i>_d{x,y,z},
//   c<i>_dv{x,y,z}, c<i>_dspeed, c<i>_pspeed, c<i>_T, c<i>_Td, c<i>_margin.
std::string trace_header(int carriers);
std::string trace_csv(const SimTrace& trace);

nlohmann::json metrics_json(const MetricsReport& metrics);

// The YAML serialization of `config` as a JSON object.
nlohmann::json config_json(const ScenarioConfig& config);

nlohmann::json summary_json(const ScenarioConfig& config, const SimTrace& trace,
                            const MetricsReport& metrics);

// Writes trace.csv, summary.json and (if enabled) plotdata/*.csv into
// `dir`, creating it. Throws kIo on failure.
void write_run(const std::string& dir, const ScenarioConfig& config, const SimTrace& trace,
               const MetricsReport& metrics);

struct Comparison {
  ScenarioConfig off_config;
  ScenarioConfig on_config;
  SimTrace off;
  SimTrace on;
  MetricsReport off_metrics;
  MetricsReport on_metrics;
};

// Runs `config` with the optimizer disabled and enabled.
Comparison run_comparison(const ScenarioConfig& config);

nlohmann::json comparison_json(const Comparison& c);
std::string comparison_table(const Comparison& c);

// Writes off/ and on/ run directories plus comparison.json and
// comparison.txt into `dir`.
void write_comparison(const std::string& dir, const Comparison& c);

}  // namespace nonstop
