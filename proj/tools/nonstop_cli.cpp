// nonstop: command-line front end for the cooperative-transport simulator.
//
//   nonstop run <config> [--out DIR] [--override key=value]... [--seed-check]
//   nonstop compare <config> [--out DIR] [--override key=value]...
//
// Without --out, results go to $NONSTOP_OUTPUT_ROOT/<scenario name>, or
// runs/<scenario name> when the variable is unset.
//
// Exit status: 0 success, 1 I/O or internal failure, 2 invalid config,
// 3 simulation aborted, 4 optimizer fallback budget exhausted, 5 seed-check
// mismatch.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nonstop/nonstop.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitSeedMismatch = 5;

struct Deleter {
  void operator()(nst_config* p) const { nst_config_free(p); }
  void operator()(nst_result* p) const { nst_result_free(p); }
  void operator()(nst_comparison* p) const { nst_comparison_free(p); }
  void operator()(char* p) const { nst_string_free(p); }
};
using ConfigPtr = std::unique_ptr<nst_config, Deleter>;
using ResultPtr = std::unique_ptr<nst_result, Deleter>;
using ComparisonPtr = std::unique_ptr<nst_comparison, Deleter>;
using StringPtr = std::unique_ptr<char, Deleter>;

int report(nst_status status, const char* what) {
  std::fprintf(stderr, "nonstop: %s: %s\n", what, nst_last_error());
  switch (status) {
    case NST_ERR_PARSE:
    case NST_ERR_VALIDATION:
    case NST_ERR_INVALID_ARGUMENT:
      return kExitInvalidConfig;
    default:
      return kExitFailure;
  }
}

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  bool seed_check = false;
};

// Loads the config and applies overrides; returns an exit code on failure.
int load(const Options& opt, ConfigPtr& config) {
  nst_config* raw = nullptr;
  nst_status s = nst_config_load(opt.config.c_str(), &raw);
  if (s == NST_ERR_IO) {
    std::fprintf(stderr, "nonstop: config: %s\n", nst_last_error());
    return kExitInvalidConfig;
  }
  if (s != NST_OK) return report(s, "config");
  config.reset(raw);
  for (const auto& o : opt.overrides) {
    s = nst_config_override(config.get(), o.c_str());
    if (s != NST_OK) return report(s, "override");
  }
  return 0;
}

std::string output_dir(const Options& opt, const nst_config* config) {
  if (!opt.out.empty()) return opt.out;
  char* name = nullptr;
  std::string scenario = "scenario";
  if (nst_config_name(config, &name) == NST_OK) {
    scenario = name;
    nst_string_free(name);
  }
  const char* root = std::getenv("NONSTOP_OUTPUT_ROOT");
  return std::string(root && *root ? root : "runs") + "/" + scenario;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int seed_check(const nst_config* config, const std::string& dir) {
  const std::string written = read_file(dir + "/trace.csv");
  nst_result* raw = nullptr;
  if (nst_status s = nst_run(config, &raw); s != NST_OK) return report(s, "seed-check rerun");
  ResultPtr rerun(raw);
  char* csv = nullptr;
  if (nst_status s = nst_result_trace_csv(rerun.get(), &csv); s != NST_OK) return report(s, "trace");
  StringPtr again(csv);
  const std::string second(again.get());
  if (written.empty() || written != second) {
    std::printf("seed-check: FAIL (trace.csv differs on rerun: %zu vs %zu bytes)\n", written.size(),
                second.size());
    return kExitSeedMismatch;
  }
  std::printf("seed-check: PASS (%zu identical bytes)\n", written.size());
  return 0;
}

int run_command(const Options& opt) {
  ConfigPtr config;
  if (int rc = load(opt, config)) return rc;
  const std::string dir = output_dir(opt, config.get());

  nst_result* raw = nullptr;
  if (nst_status s = nst_run(config.get(), &raw); s != NST_OK) return report(s, "run");
  ResultPtr result(raw);
  if (nst_status s = nst_result_write(result.get(), dir.c_str()); s != NST_OK) {
    return report(s, "write");
  }
  const int rc = nst_result_exit_code(result.get());
  std::printf("wrote %s (%s)\n", dir.c_str(), rc == 0 ? "completed" : "aborted");
  if (rc != 0) return rc;
  return opt.seed_check ? seed_check(config.get(), dir) : 0;
}

int compare_command(const Options& opt) {
  ConfigPtr config;
  if (int rc = load(opt, config)) return rc;
  const std::string dir = output_dir(opt, config.get());

  nst_comparison* raw = nullptr;
  if (nst_status s = nst_compare(config.get(), &raw); s != NST_OK) return report(s, "compare");
  ComparisonPtr cmp(raw);
  if (nst_status s = nst_comparison_write(cmp.get(), dir.c_str()); s != NST_OK) {
    return report(s, "write");
  }
  char* table = nullptr;
  if (nst_status s = nst_comparison_table(cmp.get(), &table); s != NST_OK) return report(s, "table");
  StringPtr text(table);
  std::fputs(text.get(), stdout);
  std::printf("wrote %s\n", dir.c_str());
  return nst_comparison_exit_code(cmp.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative cable-suspended transport with non-stopping carriers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nst_version()));

  Options run_opt;
  auto* run = app.add_subcommand("run", "simulate one scenario and write its outputs");
  run->add_option("config", run_opt.config, "scenario YAML file")->required();
  run->add_option("--out", run_opt.out, "output directory");
  run->add_option("--override", run_opt.overrides, "config override key=value (repeatable)")
      ->allow_extra_args(false);
  run->add_flag("--seed-check", run_opt.seed_check, "rerun and byte-compare trace.csv");

  Options cmp_opt;
  auto* cmp = app.add_subcommand("compare", "run with the optimizer off and on");
  cmp->add_option("config", cmp_opt.config, "scenario YAML file")->required();
  cmp->add_option("--out", cmp_opt.out, "output directory");
  cmp->add_option("--override", cmp_opt.overrides, "config override key=value (repeatable)")
      ->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalidConfig;
  }
  if (*run) return run_command(run_opt);
  return compare_command(cmp_opt);
}
