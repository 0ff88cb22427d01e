// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"
#include "config_io.hpp"

#include "bsmimo/parallel.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace bsm;
  CLI::App app{"Backscatter-MIMO discovery and alignment simulator"};
  app.set_version_flag("--version", cli::tool_version);

  std::string subcommand;
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::int64_t trials = 0, episodes = 0;
  int workers = 0;

  app.add_option("subcommand", subcommand, "What to run")
      ->required()
      ->check(CLI::IsMember(cli::subcommand_names()));
  app.add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--trials", trials, "Trials per Monte Carlo point")->check(CLI::PositiveNumber);
  app.add_option("--episodes", episodes, "Coherence episodes for e2e")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--override", overrides, "dotted.path=value, repeatable")->take_all();
  app.add_option("--workers", workers, "OpenMP worker count (env BSMIMO_WORKERS)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  if (workers == 0) {
    if (const char* env = std::getenv("BSMIMO_WORKERS")) workers = std::atoi(env);
  }
  if (workers > 0) set_worker_count(workers);

  try {
    ScenarioConfig cfg = config_path.empty() ? ScenarioConfig{} : cli::load_config(config_path);
    if (*seed_opt) cfg.mc.seed = seed;
    if (trials > 0) cfg.mc.trials = trials;
    if (episodes > 0) cfg.mc.episodes = episodes;
    const auto m = cli::run_subcommand(subcommand, cfg, overrides, out_dir);
    std::cout << m.subcommand << ": wrote";
    for (const auto& o : m.outputs) std::cout << ' ' << o;
    std::cout << " (" << m.wall_time_s << " s, hash " << m.config_hash << ")\n";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cli::InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
