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
 * episode_io.hpp
 *
 * Episode logs as JSON lines:
 *
 *   {"type":"header", "format":"outnav-episode", "version":1, ...}
 *   {"type":"tick", ...}            one per control tick
 *   {"type":"outcome", ...}         outcome and summary metrics
 *
 * and the aggregate / per-episode CSV tables.
 */

#ifndef OUTNAV_EPISODE_IO_HPP
#define OUTNAV_EPISODE_IO_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "outnav/serialization.hpp"
#include "outnav/sim.hpp"

namespace outnav {

inline constexpr const char* kEpisodeFormat = "outnav-episode";
inline constexpr int kEpisodeFormatVersion = 1;

inline json metrics_to_json(const EpisodeMetrics& m) {
  return {{"success", m.success},
          {"elapsed", m.elapsed},
          {"path_length", m.path_length},
          {"true_path_length", m.true_path_length},
          {"mean_velocity", m.mean_velocity},
          {"instability_cost", m.instability_cost},
          {"elevation_gradient", m.elevation_gradient},
          {"odometry_drift", m.odometry_drift},
          {"final_distance", m.final_distance}};
}

inline json tick_to_json(const TickRecord& r) {
  const RobotState& s = r.state;
  json active = json::array();
  json reason = json::array();
  for (std::size_t i = 0; i < r.decision.active.size(); ++i) {
    active.push_back(std::string(to_string(r.decision.active[i])));
    reason.push_back(std::string(to_string(r.decision.reason[i])));
  }
  return {{"type", "tick"},
          {"tick", r.tick},
          {"t", r.t},
          {"state",
           {{"x", s.x}, {"y", s.y}, {"yaw", s.yaw}, {"roll", s.roll}, {"pitch", s.pitch},
            {"v", s.v}, {"w", s.w}, {"v_actual", s.v_actual},
            {"gait", std::string(to_string(s.gait))}}},
          {"odom", {r.odom.x, r.odom.y, r.odom.yaw}},
          {"cmd", {r.command.v, r.command.w}},
          {"window", {r.window.v_lo, r.window.v_hi, r.window.w_lo, r.window.w_hi}},
          {"speed_scale", r.speed_scale},
          {"sensed", r.sensed},
          {"metrics",
           {{"q_uneven", r.metrics.q_uneven},
            {"q_surf", r.metrics.q_surf},
            {"q_pliable", r.metrics.q_pliable},
            {"vertical_gradient", r.metrics.vertical_gradient_present},
            {"degenerate_elevation", r.metrics.degenerate_elevation}}},
          {"active", std::move(active)},
          {"reason", std::move(reason)},
          {"imu", r.imu},
          {"vibration", r.vibration},
          {"recovery", r.recovery},
          {"detour", r.detour}};
}

inline void write_episode_jsonl(std::ostream& out, const EpisodeLog& log,
                                const EpisodeMetrics& m) {
  const json header = {{"type", "header"},
                       {"format", kEpisodeFormat},
                       {"version", kEpisodeFormatVersion},
                       {"scenario", log.scenario},
                       {"method", std::string(to_string(log.method))},
                       {"robot", log.robot.name},
                       {"robot_kind", std::string(to_string(log.robot.kind))},
                       {"seed", log.seed},
                       {"start", {log.start.x, log.start.y, log.start.yaw}},
                       {"goal", {log.goal.x, log.goal.y}},
                       {"dt", log.dt},
                       {"tau_surf", log.tau_surf}};
  out << header.dump() << '\n';
  for (const TickRecord& r : log.ticks) out << tick_to_json(r).dump() << '\n';
  json tail = {{"type", "outcome"}, {"outcome", std::string(to_string(log.outcome))},
               {"ticks", log.ticks.size()}};
  tail["metrics"] = metrics_to_json(m);
  out << tail.dump() << '\n';
}

/// Writes to a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Parsed log: header fields, tick records and the recorded outcome.
struct LoadedEpisode {
  json header;
  std::vector<TickRecord> ticks;
  Outcome outcome = Outcome::kRunning;
  json metrics;
};

inline LoadedEpisode read_episode_jsonl(std::istream& in) {
  LoadedEpisode ep;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "header" || j.value("format", "") != kEpisodeFormat) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": not an episode log");
      }
      if (j.value("version", 0) != kEpisodeFormatVersion) {
        throw std::runtime_error("unsupported episode log version");
      }
      ep.header = j;
      have_header = true;
      continue;
    }
    if (type == "tick") {
      TickRecord r;
      r.tick = j.at("tick").get<int>();
      r.t = j.at("t").get<double>();
      const json& s = j.at("state");
      r.state.x = s.at("x");
      r.state.y = s.at("y");
      r.state.yaw = s.at("yaw");
      r.state.roll = s.at("roll");
      r.state.pitch = s.at("pitch");
      r.state.v = s.at("v");
      r.state.w = s.at("w");
      r.state.v_actual = s.at("v_actual");
      r.state.gait = gait_from_string(s.at("gait").get<std::string>()).value_or(Gait::kTrot);
      const auto& o = j.at("odom");
      r.odom = {o[0], o[1], o[2]};
      r.command = {j.at("cmd")[0], j.at("cmd")[1]};
      const auto& w = j.at("window");
      r.window = {w[0], w[1], w[2], w[3]};
      r.speed_scale = j.at("speed_scale");
      r.sensed = j.at("sensed");
      const json& m = j.at("metrics");
      r.metrics.q_uneven = m.at("q_uneven");
      r.metrics.q_surf = m.at("q_surf");
      r.metrics.q_pliable = m.at("q_pliable");
      r.metrics.vertical_gradient_present = m.at("vertical_gradient");
      r.metrics.degenerate_elevation = m.value("degenerate_elevation", false);
      const auto& act = j.at("active");
      const auto& why = j.at("reason");
      for (std::size_t i = 0; i < act.size(); ++i) {
        r.decision.active.push_back(module_from_string(act[i].get<std::string>()).value());
        const std::string rs = why[i].get<std::string>();
        Trigger t = Trigger::kFallback;
        for (Trigger c : {Trigger::kPliable, Trigger::kUneven, Trigger::kSurface}) {
          if (to_string(c) == rs) t = c;
        }
        r.decision.reason.push_back(t);
      }
      r.imu = j.at("imu").get<ImuSample>();
      r.vibration = j.at("vibration");
      r.recovery = j.at("recovery");
      r.detour = j.value("detour", false);
      ep.ticks.push_back(std::move(r));
    } else if (type == "outcome") {
      ep.outcome = outcome_from_string(j.at("outcome").get<std::string>()).value_or(Outcome::kRunning);
      ep.metrics = j.value("metrics", json::object());
    }
  }
  if (!have_header) throw std::runtime_error("empty episode log");
  return ep;
}

// ─── CSV tables ─────────────────────────────────────────────────────────────

struct EpisodeSummary {
  std::string scenario;
  Method method = Method::kAdventr;
  std::string robot;
  std::uint64_t seed = 0;
  EpisodeMetrics metrics;
};

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

/// One row per (method, scenario) with the mean of each metric, in order of
/// first appearance.
inline std::string aggregate_csv(const std::vector<EpisodeSummary>& rows) {
  struct Acc {
    int n = 0;
    int successes = 0;
    double vel = 0.0, inst = 0.0, elev = 0.0;
  };
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto& r : rows) {
    const auto key = std::make_pair(std::string(to_string(r.method)), r.scenario);
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    ++a.n;
    a.successes += r.metrics.success ? 1 : 0;
    a.vel += r.metrics.mean_velocity;
    a.inst += r.metrics.instability_cost;
    a.elev += r.metrics.elevation_gradient;
  }
  std::ostringstream out;
  out << "method,scenario,success_rate,mean_velocity,instability_cost,elevation_gradient\n";
  for (const auto& key : order) {
    const Acc& a = acc[key];
    out << key.first << ',' << key.second << ',' << format_fixed(double(a.successes) / a.n)
        << ',' << format_fixed(a.vel / a.n) << ',' << format_fixed(a.inst / a.n) << ','
        << format_fixed(a.elev / a.n) << '\n';
  }
  return out.str();
}

inline std::string episodes_csv(const std::vector<EpisodeSummary>& rows) {
  std::ostringstream out;
  out << "method,scenario,robot,seed,outcome,elapsed,path_length,true_path_length,"
         "mean_velocity,instability_cost,elevation_gradient,odometry_drift\n";
  for (const auto& r : rows) {
    const EpisodeMetrics& m = r.metrics;
    out << to_string(r.method) << ',' << r.scenario << ',' << r.robot << ',' << r.seed << ','
        << to_string(m.outcome) << ',' << format_fixed(m.elapsed, 1) << ','
        << format_fixed(m.path_length) << ',' << format_fixed(m.true_path_length) << ','
        << format_fixed(m.mean_velocity) << ',' << format_fixed(m.instability_cost) << ','
        << format_fixed(m.elevation_gradient) << ',' << format_fixed(m.odometry_drift) << '\n';
  }
  return out.str();
}

inline std::string episode_log_name(const EpisodeSummary& r) {
  return std::string(to_string(r.method)) + "_" + r.scenario + "_seed" +
         std::to_string(r.seed) + ".jsonl";
}

}  // namespace outnav

#endif  // OUTNAV_EPISODE_IO_HPP
