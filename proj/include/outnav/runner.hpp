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

/*
 * runner.hpp
 *
 * Batch harness: run configs, the scenario x method x seed matrix, and the
 * describe / replay printers used by the command-line tool.
 *
 * Episodes are independent and seeded per cell, so the matrix can run on any
 * number of threads and still produce the same tables.
 */

#ifndef OUTNAV_RUNNER_HPP
#define OUTNAV_RUNNER_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "outnav/episode_io.hpp"
#include "outnav/scenarios.hpp"
#include "outnav/serialization.hpp"
#include "outnav/sim.hpp"

namespace outnav {

/// Invalid configuration; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::vector<std::string> scenarios = {"s1"};
  std::string world_file;       // custom scenario document; replaces `scenarios`
  std::string robot;            // empty: each scenario's default
  std::vector<Method> methods = {Method::kAdventr};
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "outnav_out";
  int jobs = 1;
  bool write_logs = true;
  bool quiet = false;           // no per-episode progress lines
  double tau_surf = 0.0;        // > 0 pins the threshold instead of calibrating
  EpisodeConfig episode;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first occurrence of "key" as an object key; 0 if absent.
inline int line_of_key(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    std::size_t k = pos + needle.size();
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') return line_of_offset(text, pos);
    pos += needle.size();
  }
  return 0;
}

inline std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
  // "a-b" (inclusive), "a,b,c" or a single number.
  std::vector<std::uint64_t> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const std::uint64_t a = std::stoull(part.substr(0, dash));
        const std::uint64_t b = std::stoull(part.substr(dash + 1));
        if (b < a) throw std::invalid_argument("descending range");
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(part));
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad seed spec '" + part + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty seed spec");
  return out;
}

}  // namespace detail

inline std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  return detail::parse_seed_spec(spec);
}

/// Applies a JSON config document over `cfg`. `text` is the raw document and
/// is only used to attach line numbers to errors.
inline void apply_config_json(RunConfig& cfg, const json& j, const std::string& text = {}) {
  const auto fail = [&](const std::string& key, const std::string& what) -> void {
    throw ConfigError(detail::line_of_key(text, key), key + ": " + what);
  };
  if (!j.is_object()) throw ConfigError(1, "config must be a JSON object");
  static const std::vector<std::string> known = {
      "scenario", "scenarios", "world_file", "robot",   "method",    "methods",
      "seeds",    "output_dir", "jobs",      "write_logs", "quiet",    "thresholds",
      "planner",  "episode",   "lidar",     "perception"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown key");
  }
  const auto str_list = [&](const char* key) {
    const json& v = j.at(key);
    std::vector<std::string> out;
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_string()) fail(key, "expected strings");
        out.push_back(e.get<std::string>());
      }
    } else {
      fail(key, "expected a string or a list of strings");
    }
    return out;
  };
  const auto number = [&](const json& obj, const char* key, double& dst) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_number()) fail(key, "expected a number");
    dst = obj.at(key).get<double>();
  };
  const auto integer = [&](const json& obj, const char* key, int& dst) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_number_integer()) fail(key, "expected an integer");
    dst = obj.at(key).get<int>();
  };

  for (const char* key : {"scenario", "scenarios"}) {
    if (!j.contains(key)) continue;
    cfg.scenarios = str_list(key);
    for (const auto& s : cfg.scenarios) {
      const auto& ids = builtin_scenario_ids();
      if (std::find(ids.begin(), ids.end(), s) == ids.end()) {
        fail(key, "unknown scenario '" + s + "'");
      }
    }
  }
  if (j.contains("world_file")) {
    if (!j.at("world_file").is_string()) fail("world_file", "expected a path");
    cfg.world_file = j.at("world_file").get<std::string>();
  }
  if (j.contains("robot")) {
    if (!j.at("robot").is_string()) fail("robot", "expected a name");
    cfg.robot = j.at("robot").get<std::string>();
    if (!robot_by_name(cfg.robot)) fail("robot", "unknown robot '" + cfg.robot + "'");
  }
  for (const char* key : {"method", "methods"}) {
    if (!j.contains(key)) continue;
    cfg.methods.clear();
    for (const auto& name : str_list(key)) {
      const auto m = method_from_string(name);
      if (!m) fail(key, "unknown method '" + name + "'");
      cfg.methods.push_back(*m);
    }
  }
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    cfg.seeds.clear();
    if (s.is_array()) {
      for (const auto& e : s) {
        if (!e.is_number_unsigned()) fail("seeds", "expected nonnegative integers");
        cfg.seeds.push_back(e.get<std::uint64_t>());
      }
    } else if (s.is_string()) {
      try {
        cfg.seeds = parse_seeds(s.get<std::string>());
      } catch (const std::invalid_argument& e) {
        fail("seeds", e.what());
      }
    } else if (s.is_object()) {
      const std::uint64_t first = s.value("first", std::uint64_t{0});
      const std::uint64_t count = s.value("count", std::uint64_t{0});
      for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(first + i);
    } else {
      fail("seeds", "expected a list, a range string or {first, count}");
    }
    if (cfg.seeds.empty()) fail("seeds", "no seeds");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) fail("output_dir", "expected a path");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  integer(j, "jobs", cfg.jobs);
  if (cfg.jobs < 1) fail("jobs", "must be >= 1");
  if (j.contains("write_logs")) {
    if (!j.at("write_logs").is_boolean()) fail("write_logs", "expected true/false");
    cfg.write_logs = j.at("write_logs").get<bool>();
  }
  if (j.contains("quiet")) {
    if (!j.at("quiet").is_boolean()) fail("quiet", "expected true/false");
    cfg.quiet = j.at("quiet").get<bool>();
  }

  EpisodeConfig& ep = cfg.episode;
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    number(t, "tau_uneven", ep.thresholds.tau_uneven);
    number(t, "tau_pliable", ep.thresholds.tau_pliable);
    number(t, "tau_vertical", ep.thresholds.tau_vertical);
    number(t, "band_lo", ep.thresholds.band_lo);
    number(t, "band_hi", ep.thresholds.band_hi);
    number(t, "tau_surf", cfg.tau_surf);
    for (double v : {ep.thresholds.tau_uneven, ep.thresholds.tau_pliable,
                     ep.thresholds.tau_vertical}) {
      if (!(v > 0.0)) fail("thresholds", "thresholds must be positive");
    }
  }
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    PlannerConfig& pc = ep.planner;
    if (p.contains("weights")) {
      const json& w = p.at("weights");
      number(w, "alpha", pc.weights.alpha);
      number(w, "beta", pc.weights.beta);
      number(w, "gamma", pc.weights.gamma);
      number(w, "delta", pc.weights.delta);
      number(w, "theta", pc.weights.theta);
      for (double v : {pc.weights.alpha, pc.weights.beta, pc.weights.gamma, pc.weights.delta,
                       pc.weights.theta}) {
        if (v < 0.0) fail("weights", "weights must be >= 0");
      }
    }
    integer(p, "nv", pc.nv);
    integer(p, "nw", pc.nw);
    if (pc.nv < 2 || pc.nw < 2) fail("planner", "velocity grid must be at least 2x2");
    number(p, "horizon", pc.horizon);
    number(p, "dt_window", pc.dt_window);
    number(p, "clearance_cap", pc.clearance_cap);
    if (p.contains("sampling")) {
      const std::string s = p.value("sampling", "");
      if (s == "arc") {
        pc.sampling = CostSampling::kAlongArc;
      } else if (s == "endpoint") {
        pc.sampling = CostSampling::kEndpoint;
      } else {
        fail("sampling", "expected \"arc\" or \"endpoint\"");
      }
    }
  }
  if (j.contains("episode")) {
    const json& e = j.at("episode");
    number(e, "timeout", ep.timeout);
    integer(e, "hysteresis_ticks", ep.hysteresis_ticks);
    integer(e, "window_length", ep.window_length);
    if (e.contains("surface_speed_cap")) ep.surface_speed_cap = e.at("surface_speed_cap").get<bool>();
    if (!(ep.timeout > 0.0)) fail("timeout", "must be > 0");
    if (ep.hysteresis_ticks < 1) fail("hysteresis_ticks", "must be >= 1");
    if (ep.window_length < 8) fail("window_length", "must be >= 8");
  }
  if (j.contains("lidar")) {
    const json& l = j.at("lidar");
    integer(l, "n_azimuth", ep.lidar.n_azimuth);
    integer(l, "n_rings", ep.lidar.n_rings);
    number(l, "max_range", ep.lidar.max_range);
    number(l, "z_noise_std", ep.lidar.z_noise_std);
    number(l, "p_penetrate_tall_grass", ep.lidar.p_penetrate_tall_grass);
    number(l, "p_penetrate_bush", ep.lidar.p_penetrate_bush);
    if (ep.lidar.n_azimuth < 1 || ep.lidar.n_rings <= ep.lidar.n_upper_rings) {
      fail("lidar", "ring/azimuth counts out of range");
    }
  }
  if (j.contains("perception")) {
    const json& p = j.at("perception");
    number(p, "surface_noise_std", ep.perception.surface_noise_std);
    number(p, "misclassification_rate", ep.perception.vegetation.misclassification_rate);
    const double rate = ep.perception.vegetation.misclassification_rate;
    if (!(rate >= 0.0 && rate <= 1.0)) fail("misclassification_rate", "must be in [0,1]");
  }
}

inline RunConfig parse_run_config(const std::string& text, RunConfig base = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                      std::string("malformed JSON: ") + e.what());
  }
  apply_config_json(base, j, text);
  return base;
}

inline RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

// ─── Matrix ─────────────────────────────────────────────────────────────────

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open world file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                      path.string() + ": malformed JSON");
  }
  try {
    return scenario_from_json(j);
  } catch (const FormatError& e) {
    const auto dot = e.path().find_last_of('.');
    const std::string key = dot == std::string::npos ? e.path() : e.path().substr(dot + 1);
    throw ConfigError(detail::line_of_key(text, key), path.string() + ": " + e.what());
  }
}

struct MatrixCell {
  std::string scenario;
  Method method;
  std::uint64_t seed;
};

inline RobotSpec robot_for(const RunConfig& cfg, const Scenario& s) {
  const std::string name = cfg.robot.empty() ? s.robot : cfg.robot;
  const auto r = robot_by_name(name);
  if (!r) throw ConfigError(0, "unknown robot '" + name + "'");
  return *r;
}

/// Checks every method against every scenario's robot before anything runs.
inline void validate_matrix(const RunConfig& cfg) {
  if (cfg.methods.empty()) throw ConfigError(0, "no methods");
  if (cfg.seeds.empty()) throw ConfigError(0, "no seeds");
  std::vector<Scenario> probes;
  if (!cfg.world_file.empty()) {
    probes.push_back(load_scenario_file(cfg.world_file));
  } else {
    for (const auto& id : cfg.scenarios) probes.push_back(build_scenario(id, 0));
  }
  for (const auto& s : probes) {
    const RobotSpec r = robot_for(cfg, s);
    for (Method m : cfg.methods) {
      const std::string err = method_robot_error(m, r.kind);
      if (!err.empty()) {
        throw ConfigError(0, err + " (scenario " + s.id + ", robot " + r.name + ")");
      }
    }
  }
}

struct MatrixResult {
  std::vector<EpisodeSummary> episodes;  // scenario-major, then method, then seed
  std::string aggregate;                 // CSV text
};

/// Runs the whole matrix; writes logs and tables under cfg.output_dir when
/// `write_outputs` is set.
inline MatrixResult run_matrix(const RunConfig& cfg, bool write_outputs = true,
                               std::ostream* progress = nullptr) {
  validate_matrix(cfg);
  std::optional<Scenario> custom;
  if (!cfg.world_file.empty()) custom = load_scenario_file(cfg.world_file);

  std::vector<MatrixCell> cells;
  const std::vector<std::string> ids =
      custom ? std::vector<std::string>{custom->id} : cfg.scenarios;
  for (const auto& id : ids) {
    for (Method m : cfg.methods) {
      for (std::uint64_t seed : cfg.seeds) cells.push_back({id, m, seed});
    }
  }

  // One calibration per robot, shared by every cell.
  std::map<std::string, double> tau;
  for (const auto& id : ids) {
    const Scenario probe = custom ? *custom : build_scenario(id, 0);
    const RobotSpec r = robot_for(cfg, probe);
    if (!tau.count(r.name)) {
      tau[r.name] = cfg.tau_surf > 0.0 ? cfg.tau_surf : calibrate_tau_surf(r, cfg.episode);
    }
  }

  const std::filesystem::path out_dir = cfg.output_dir;
  if (write_outputs) {
    std::filesystem::create_directories(out_dir);
    if (cfg.write_logs) std::filesystem::create_directories(out_dir / "logs");
  }

  MatrixResult result;
  result.episodes.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  std::exception_ptr error;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const MatrixCell& c = cells[i];
        const Scenario s = custom ? *custom : build_scenario(c.scenario, c.seed);
        EpisodeSetup setup;
        setup.world = &s.world;
        setup.scenario = s.id;
        setup.start = s.start;
        setup.goal = s.goal;
        setup.robot = robot_for(cfg, s);
        setup.seed = c.seed;
        setup.tau_surf = tau.at(setup.robot.name);
        EpisodeConfig ec = cfg.episode;
        ec.method = c.method;
        const EpisodeLog log = run_episode(setup, ec);
        EpisodeSummary sum{s.id, c.method, setup.robot.name, c.seed, compute_metrics(s.world, log)};
        if (write_outputs && cfg.write_logs) {
          std::ostringstream os;
          write_episode_jsonl(os, log, sum.metrics);
          write_file_atomic(out_dir / "logs" / episode_log_name(sum), os.str());
        }
        result.episodes[i] = std::move(sum);
        if (progress) {
          std::lock_guard<std::mutex> lock(io_mutex);
          const auto& e = result.episodes[i];
          *progress << to_string(e.method) << ' ' << e.scenario << " seed " << e.seed << ": "
                    << to_string(e.metrics.outcome) << '\n';
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (!error) error = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  result.aggregate = aggregate_csv(result.episodes);
  if (write_outputs) {
    write_file_atomic(out_dir / "summary.csv", result.aggregate);
    write_file_atomic(out_dir / "episodes.csv", episodes_csv(result.episodes));
  }
  return result;
}

// ─── Printers ───────────────────────────────────────────────────────────────

inline void describe_scenario(std::ostream& out, const Scenario& s) {
  const TerrainWorld& w = s.world;
  out << "scenario " << s.id << ": " << s.description << '\n';
  out << "  robot    " << s.robot << '\n';
  out << "  start    (" << format_fixed(s.start.x, 2) << ", " << format_fixed(s.start.y, 2)
      << ") yaw " << format_fixed(s.start.yaw, 3) << '\n';
  out << "  goal     (" << format_fixed(s.goal.x, 2) << ", " << format_fixed(s.goal.y, 2)
      << ")\n";
  out << "  bounds   x [" << w.bounds.x_min << ", " << w.bounds.x_max << "]  y ["
      << w.bounds.y_min << ", " << w.bounds.y_max << "]\n";
  out << "  surface  default " << to_string(w.default_surface) << '\n';
  for (const auto& r : w.regions) {
    out << "  region   " << to_string(r.surface) << "  ";
    if (const auto* d = std::get_if<Disk>(&r.shape)) {
      out << "disk (" << d->center.x << ", " << d->center.y << ") r " << d->radius;
    } else {
      out << "polygon";
      for (Vec2 v : std::get<Polygon>(r.shape).vertices) out << " (" << v.x << ", " << v.y << ")";
    }
    out << '\n';
  }
  std::map<std::string, int> counts;
  for (const auto& v : w.vegetation) ++counts[std::string(to_string(v.kind))];
  for (const auto& [kind, n] : counts) out << "  veg      " << kind << " x" << n << '\n';
  for (const auto& v : w.vegetation) {
    if (v.kind == VegetationKind::kTallGrass) continue;
    out << "           " << to_string(v.kind) << " at (" << format_fixed(v.position.x, 2)
        << ", " << format_fixed(v.position.y, 2) << ") r " << v.radius << '\n';
  }
  out << "  rigid    " << w.obstacles.size() << " obstacles\n";
  out << "  terrain  " << w.terrain.bumps.size() << " mounds, " << w.terrain.steps.size()
      << " steps, slope (" << w.terrain.slope_x << ", " << w.terrain.slope_y << ")\n";
}

inline void replay(std::ostream& out, const LoadedEpisode& ep, bool sensed_only = false) {
  const json& h = ep.header;
  out << "episode " << h.value("method", "?") << ' ' << h.value("scenario", "?") << " seed "
      << h.value("seed", std::uint64_t{0}) << " robot " << h.value("robot", "?") << '\n';
  out << "tick      t        x        y      yaw      v      w  gait        active\n";
  for (const TickRecord& r : ep.ticks) {
    if (sensed_only && !r.sensed) continue;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%4d %6.1f %8.3f %8.3f %8.3f %6.3f %6.3f  %-10s ", r.tick,
                  r.t, r.state.x, r.state.y, r.state.yaw, r.command.v, r.command.w,
                  std::string(to_string(r.state.gait)).c_str());
    out << buf;
    for (std::size_t i = 0; i < r.decision.active.size(); ++i) {
      out << (i ? "," : "") << to_string(r.decision.active[i]) << '('
          << to_string(r.decision.reason[i]) << ')';
    }
    if (r.decision.active.empty()) out << '-';
    if (r.sensed) {
      out << "  q_uneven=" << format_fixed(r.metrics.q_uneven, 3)
          << " q_surf=" << format_fixed(r.metrics.q_surf, 3)
          << " q_pliable=" << format_fixed(r.metrics.q_pliable, 3)
          << (r.metrics.vertical_gradient_present ? " vertical" : "");
    }
    if (r.recovery) out << "  RECOVERY";
    if (r.detour) out << "  detour";
    out << '\n';
  }
  out << "outcome " << to_string(ep.outcome) << '\n';
}

}  // namespace outnav

#endif  // OUTNAV_RUNNER_HPP
