// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsmimo/scenario.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsm::cli {

inline constexpr const char* tool_version = "0.3.0";

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string subcommand;
  std::vector<std::string> outputs;  // data files, relative to out_dir
  double wall_time_s = 0.0;
  std::string tool_version;
};

struct UnknownSubcommand : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computed result broke an invariant the acceptance suite relies on.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& subcommand_names();

// Applies overrides, runs the pipeline, writes CSV/JSON outputs plus
// config.json and manifest.json into out_dir.
RunManifest run_subcommand(const std::string& name, const ScenarioConfig& cfg, const std::vector<std::string>& overrides,
                           const std::filesystem::path& out_dir);

}  // namespace bsm::cli
