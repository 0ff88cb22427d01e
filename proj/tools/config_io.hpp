// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/scenario.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bsm::cli {

// Missing file, parse failure, unknown key, type mismatch and range violation
// all raise ConfigError with the offending path.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

// "dotted.path=value"; value is parsed as JSON when possible, else taken as a string.
ScenarioConfig apply_overrides(const ScenarioConfig& cfg, const std::vector<std::string>& overrides);

// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace bsm::cli
