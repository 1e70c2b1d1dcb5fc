// Copyright 2026 The outnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// outnav: run episode matrices, describe scenarios, replay episode logs.
//
//   outnav run --config run.json --method adventr --method naive --seeds 0-19
//   outnav describe s3 [--json] [--seed 4]
//   outnav replay out/logs/adventr_s3_seed4.jsonl [--sensed-only]
//
// Precedence: built-in defaults < config file < OUTNAV_OUTPUT_DIR / OUTNAV_JOBS
// < command-line flags.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "outnav/outnav.hpp"

namespace {

using namespace outnav;

int run_command(const std::string& config_path, const std::vector<std::string>& scenarios,
                const std::string& world_file, const std::string& robot,
                const std::vector<std::string>& methods, const std::string& seeds,
                const std::string& output_dir, int jobs, int logs_flag, double tau_surf,
                double timeout, bool quiet) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);

  if (const char* env = std::getenv("OUTNAV_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (const char* env = std::getenv("OUTNAV_JOBS"); env && *env) {
    try {
      cfg.jobs = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(0, "OUTNAV_JOBS must be an integer");
    }
    if (cfg.jobs < 1) throw ConfigError(0, "OUTNAV_JOBS must be >= 1");
  }

  if (!scenarios.empty()) {
    for (const auto& s : scenarios) {
      const auto& ids = builtin_scenario_ids();
      if (std::find(ids.begin(), ids.end(), s) == ids.end()) {
        throw ConfigError(0, "unknown scenario '" + s + "'");
      }
    }
    cfg.scenarios = scenarios;
    cfg.world_file.clear();
  }
  if (!world_file.empty()) cfg.world_file = world_file;
  if (!robot.empty()) {
    if (!robot_by_name(robot)) throw ConfigError(0, "unknown robot '" + robot + "'");
    cfg.robot = robot;
  }
  if (!methods.empty()) {
    cfg.methods.clear();
    for (const auto& name : methods) {
      const auto m = method_from_string(name);
      if (!m) throw ConfigError(0, "unknown method '" + name + "'");
      cfg.methods.push_back(*m);
    }
  }
  if (!seeds.empty()) {
    try {
      cfg.seeds = parse_seeds(seeds);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
  }
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (jobs > 0) cfg.jobs = jobs;
  if (logs_flag != 0) cfg.write_logs = logs_flag > 0;
  if (tau_surf > 0.0) cfg.tau_surf = tau_surf;
  if (timeout > 0.0) cfg.episode.timeout = timeout;

  if (quiet) cfg.quiet = true;

  const MatrixResult r = run_matrix(cfg, true, cfg.quiet ? nullptr : &std::cerr);
  std::cout << r.aggregate;
  return 0;
}

int describe_command(const std::string& id, std::uint64_t seed, bool as_json,
                     const std::string& world_file) {
  const Scenario s = world_file.empty() ? build_scenario(id, seed) : load_scenario_file(world_file);
  if (as_json) {
    std::cout << to_json(s).dump(2) << '\n';
  } else {
    describe_scenario(std::cout, s);
  }
  return 0;
}

int replay_command(const std::string& path, bool sensed_only) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot open " << path << '\n';
    return 2;
  }
  replay(std::cout, read_episode_jsonl(f), sensed_only);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"outnav: scene-aware outdoor navigation simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario x method x seed matrix");
  std::string config_path, world_file, robot, seeds, output_dir;
  std::vector<std::string> scenarios, methods;
  int jobs = 0;
  bool logs = false, no_logs = false, quiet = false;
  double tau_surf = 0.0, timeout = 0.0;
  run->add_option("-c,--config", config_path, "JSON run config")->check(CLI::ExistingFile);
  run->add_option("-s,--scenario", scenarios, "built-in scenario id (repeatable)");
  run->add_option("--world-file", world_file, "custom scenario document")->check(CLI::ExistingFile);
  run->add_option("-r,--robot", robot, "robot spec name (husky, spot)");
  run->add_option("-m,--method", methods, "method (repeatable)");
  run->add_option("--seeds", seeds, "seed list: 7, 0-19 or 1,4,9");
  run->add_option("-o,--output-dir", output_dir, "output directory");
  run->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--logs", logs, "write per-episode JSONL logs");
  run->add_flag("--no-logs", no_logs, "skip per-episode logs");
  run->add_option("--tau-surf", tau_surf, "pin the surface threshold instead of calibrating");
  run->add_option("--timeout", timeout, "episode timeout in seconds");
  run->add_flag("-q,--quiet", quiet, "no per-episode progress on stderr");

  auto* describe = app.add_subcommand("describe", "print a scenario inventory");
  std::string scenario_id = "s1";
  std::uint64_t seed = 0;
  bool as_json = false;
  std::string describe_world;
  describe->add_option("id", scenario_id, "scenario id");
  describe->add_option("--seed", seed, "layout seed");
  describe->add_flag("--json", as_json, "print the scenario document");
  describe->add_option("--world-file", describe_world, "describe a custom scenario document")
      ->check(CLI::ExistingFile);

  auto* rep = app.add_subcommand("replay", "print the per-tick trace of an episode log");
  std::string log_path;
  bool sensed_only = false;
  rep->add_option("log", log_path, "JSONL episode log")->required();
  rep->add_flag("--sensed-only", sensed_only, "only ticks with a switch evaluation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const int logs_flag = no_logs ? -1 : (logs ? 1 : 0);
      return run_command(config_path, scenarios, world_file, robot, methods, seeds, output_dir,
                         jobs, logs_flag, tau_surf, timeout, quiet);
    }
    if (*describe) return describe_command(scenario_id, seed, as_json, describe_world);
    if (*rep) return replay_command(log_path, sensed_only);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
