#include "nonstop/nonstop.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "nonstop/config_io.hpp"
#include "nonstop/error.hpp"
#include "nonstop/report.hpp"

struct nst_config {
  std::string text;
  std::string source;
  std::vector<std::string> overrides;
  nonstop::ScenarioConfig config;
};

struct nst_result {
  nonstop::ScenarioConfig config;
  nonstop::SimTrace trace;
  nonstop::MetricsReport metrics;
};

struct nst_comparison {
  nonstop::Comparison data;
};

namespace {

thread_local std::string g_last_error;

nst_status status_for(nonstop::ErrorCode code) {
  using nonstop::ErrorCode;
  switch (code) {
    case ErrorCode::kParse:
      return NST_ERR_PARSE;
    case ErrorCode::kValidation:
      return NST_ERR_VALIDATION;
    case ErrorCode::kIo:
      return NST_ERR_IO;
    case ErrorCode::kOptimizerFailure:
      return NST_ERR_OPTIMIZER_BUDGET;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIndexOutOfRange:
      return NST_ERR_INVALID_ARGUMENT;
    default:
      return NST_ERR_SIMULATION;
  }
}

template <class F>
nst_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return NST_OK;
  } catch (const nonstop::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NST_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NST_ERR_INTERNAL;
  }
}

nst_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return NST_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* nst_version(void) { return nonstop::artifact_version(); }

const char* nst_last_error(void) { return g_last_error.c_str(); }

const char* nst_status_name(nst_status status) {
  switch (status) {
    case NST_OK:
      return "ok";
    case NST_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case NST_ERR_PARSE:
      return "parse";
    case NST_ERR_VALIDATION:
      return "validation";
    case NST_ERR_SIMULATION:
      return "simulation";
    case NST_ERR_OPTIMIZER_BUDGET:
      return "optimizer_budget";
    case NST_ERR_IO:
      return "io";
    case NST_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

void nst_string_free(char* s) { std::free(s); }

nst_status nst_config_default(nst_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    auto c = std::make_unique<nst_config>();
    c->source = "<default>";
    c->config = nonstop::parse_config("", {}, c->source);
    *out = c.release();
  });
}

nst_status nst_config_parse(const char* text, const char* source, nst_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto c = std::make_unique<nst_config>();
    c->text = text;
    c->source = source ? source : "<string>";
    c->config = nonstop::parse_config(c->text, {}, c->source);
    *out = c.release();
  });
}

nst_status nst_config_load(const char* path, nst_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto c = std::make_unique<nst_config>();
    std::ifstream in(path);
    if (!in) throw nonstop::Error(nonstop::ErrorCode::kIo, std::string("cannot open config file '") + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    c->text = text.str();
    c->source = path;
    c->config = nonstop::parse_config(c->text, {}, c->source);
    *out = c.release();
  });
}

nst_status nst_config_override(nst_config* config, const char* assignment) {
  if (!config) return null_argument("config");
  if (!assignment) return null_argument("assignment");
  return guarded([&] {
    auto overrides = config->overrides;
    overrides.emplace_back(assignment);
    config->config = nonstop::parse_config(config->text, overrides, config->source);
    config->overrides = std::move(overrides);
  });
}

nst_status nst_config_to_yaml(const nst_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] { *out = copy_string(nonstop::serialize_config(config->config)); });
}

nst_status nst_config_name(const nst_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] { *out = copy_string(config->config.name); });
}

void nst_config_free(nst_config* config) { delete config; }

nst_status nst_run(const nst_config* config, nst_result** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto r = std::make_unique<nst_result>();
    r->config = config->config;
    r->trace = nonstop::run_closed_loop(r->config);
    r->metrics = nonstop::compute_metrics(r->trace, r->config.trajectory);
    *out = r.release();
  });
}

int nst_result_exit_code(const nst_result* result) {
  return result ? nonstop::exit_status(result->trace) : -1;
}

nst_status nst_result_trace_csv(const nst_result* result, char** out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  return guarded([&] { *out = copy_string(nonstop::trace_csv(result->trace)); });
}

nst_status nst_result_summary_json(const nst_result* result, char** out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = copy_string(nonstop::summary_json(result->config, result->trace, result->metrics).dump(2));
  });
}

nst_status nst_result_write(const nst_result* result, const char* dir) {
  if (!result) return null_argument("result");
  if (!dir) return null_argument("dir");
  return guarded([&] { nonstop::write_run(dir, result->config, result->trace, result->metrics); });
}

void nst_result_free(nst_result* result) { delete result; }

nst_status nst_compare(const nst_config* config, nst_comparison** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto c = std::make_unique<nst_comparison>();
    c->data = nonstop::run_comparison(config->config);
    *out = c.release();
  });
}

int nst_comparison_exit_code(const nst_comparison* comparison) {
  if (!comparison) return -1;
  return std::max(nonstop::exit_status(comparison->data.off), nonstop::exit_status(comparison->data.on));
}

nst_status nst_comparison_table(const nst_comparison* comparison, char** out) {
  if (!comparison) return null_argument("comparison");
  if (!out) return null_argument("out");
  return guarded([&] { *out = copy_string(nonstop::comparison_table(comparison->data)); });
}

nst_status nst_comparison_json(const nst_comparison* comparison, char** out) {
  if (!comparison) return null_argument("comparison");
  if (!out) return null_argument("out");
  return guarded([&] { *out = copy_string(nonstop::comparison_json(comparison->data).dump(2)); });
}

nst_status nst_comparison_write(const nst_comparison* comparison, const char* dir) {
  if (!comparison) return null_argument("comparison");
  if (!dir) return null_argument("dir");
  return guarded([&] { nonstop::write_comparison(dir, comparison->data); });
}

void nst_comparison_free(nst_comparison* comparison) { delete comparison; }

}  // extern "C"
