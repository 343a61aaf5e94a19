#pragma once

#include <string>

#include "ars/scenario.hpp"

namespace ars {

// Scenario configuration files: TOML (primary, see toml_lite) or JSON,
// selected by extension. Parsed configs are validated before use.
ScenarioConfig scenario_config_from_json_text(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

// Canonical resolved echo of a config; embedded into reports and manifests
// so every number traces back to one (seed, config) pair.
std::string scenario_config_to_json(const ScenarioConfig& cfg);

}  // namespace ars
