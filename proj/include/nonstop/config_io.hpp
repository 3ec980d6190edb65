#pragma once

#include <string>
#include <vector>

#include "nonstop/scenario.hpp"

namespace nonstop {

// Scenario files are YAML. Every key is optional; omitted keys keep the
// ScenarioConfig defaults and unknown keys are rejected. Overrides are
// "dotted.path=value" assignments applied to the document before decoding,
// where value is any YAML scalar or flow collection (e.g. "[1, 0, 0]").
//
// Errors: kParse for malformed YAML, wrong value types or unknown keys (the
// message carries line, column and dotted field path), kValidation for
// violated preconditions.
ScenarioConfig parse_config(const std::string& text,
                            const std::vector<std::string>& overrides = {},
                            const std::string& source = "<string>");

// Reads `path` and forwards to parse_config. Throws kIo if unreadable.
ScenarioConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides = {});

// Complete YAML document for `config`; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

// Shortest decimal text that reads back as exactly `value`.
std::string format_double(double value);

}  // namespace nonstop
