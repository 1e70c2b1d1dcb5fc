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
 * sim.hpp
 *
 * Truth dynamics and the closed control loop.
 *
 * Every tick (10 Hz): plan, sample proprioception at 50 Hz, step the truth
 * state and odometry, check termination. Every tenth tick, before planning:
 * scan, compute scene metrics, update the switch decision and rebuild the
 * perception outputs.
 */

#ifndef OUTNAV_SIM_HPP
#define OUTNAV_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "outnav/geometry.hpp"
#include "outnav/perception.hpp"
#include "outnav/planner.hpp"
#include "outnav/rng.hpp"
#include "outnav/robot.hpp"
#include "outnav/sensors.hpp"
#include "outnav/switching.hpp"
#include "outnav/world.hpp"

namespace outnav {

// ─── Methods ────────────────────────────────────────────────────────────────

enum class Method { kAdventr, kTerpOnly, kTerraPnOnly, kProNavOnly, kVernOnly, kNaive };

inline constexpr Method kAllMethods[] = {Method::kAdventr,    Method::kTerpOnly,
                                         Method::kTerraPnOnly, Method::kProNavOnly,
                                         Method::kVernOnly,   Method::kNaive};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kAdventr: return "adventr";
    case Method::kTerpOnly: return "terp_only";
    case Method::kTerraPnOnly: return "terrapn_only";
    case Method::kProNavOnly: return "pronav_only";
    case Method::kVernOnly: return "vern_only";
    case Method::kNaive: return "naive";
  }
  return "?";
}

inline std::optional<Method> method_from_string(std::string_view s) {
  for (Method m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

/// Empty string when compatible, otherwise the reason.
inline std::string method_robot_error(Method m, RobotKind kind) {
  if (m == Method::kTerraPnOnly && kind != RobotKind::kWheeled) {
    return "method terrapn_only requires a wheeled robot";
  }
  if (m == Method::kProNavOnly && kind != RobotKind::kLegged) {
    return "method pronav_only requires a legged robot";
  }
  return {};
}

/// Decision of a single-module baseline; nullopt for the switching method.
inline std::optional<SwitchDecision> fixed_decision(Method m) {
  const auto one = [](ModuleId id) {
    return SwitchDecision{{id}, {Trigger::kFallback}};
  };
  switch (m) {
    case Method::kAdventr: return std::nullopt;
    case Method::kTerpOnly: return one(ModuleId::kTerp);
    case Method::kTerraPnOnly: return one(ModuleId::kTerraPn);
    case Method::kProNavOnly: return one(ModuleId::kProNav);
    case Method::kVernOnly: return one(ModuleId::kVern);
    case Method::kNaive: return SwitchDecision{};
  }
  return std::nullopt;
}

// ─── Truth dynamics ─────────────────────────────────────────────────────────

inline double effective_slip(const TerrainWorld& world, const RobotSpec& robot, Vec2 p) {
  const Surface s = surface_at(world, p.x, p.y);
  double slip = world.surface_class(s).slip_ratio;
  if (robot.kind == RobotKind::kLegged && is_granular(s)) slip *= 0.5;
  return slip;
}

/// Height change, in map units, across the one-cell strip just ahead of the
/// footprint in the direction of travel.
inline double climb_gradient(const TerrainWorld& world, const RobotSpec& robot, Vec2 p,
                             double heading, double cell = 0.25) {
  const Vec2 u{std::cos(heading), std::sin(heading)};
  const Vec2 front = p + robot.footprint_radius * u;
  const Vec2 beyond = front + cell * u;
  return std::abs(height_at(world, beyond.x, beyond.y) - height_at(world, front.x, front.y)) *
         kMapUnitsPerMetre;
}

inline void settle_attitude(const TerrainWorld& world, const RobotSpec& robot,
                            RobotState& s) {
  const LocalSlope slope = terrain_slope(world, s.position(), s.yaw, robot.footprint_radius);
  s.pitch = std::atan(slope.along);
  s.roll = std::atan(slope.across);
}

inline RobotState step(const TerrainWorld& world, const RobotSpec& robot,
                       const RobotState& state, const VelocityCommand& cmd, double dt) {
  RobotState next = state;
  double v_eff = cmd.v * (1.0 - effective_slip(world, robot, state.position()));
  if (cmd.v != 0.0) {
    const double heading = cmd.v > 0.0 ? state.yaw : state.yaw + std::numbers::pi;
    if (climb_gradient(world, robot, state.position(), heading) > robot.max_climb_gradient) {
      v_eff = 0.0;
    }
  }
  next.x = state.x + v_eff * std::cos(state.yaw) * dt;
  next.y = state.y + v_eff * std::sin(state.yaw) * dt;
  next.yaw = wrap_angle(state.yaw + cmd.w * dt);
  next.v = cmd.v;
  next.w = cmd.w;
  next.v_actual = v_eff;
  settle_attitude(world, robot, next);
  return next;
}

// ─── Episode ────────────────────────────────────────────────────────────────

enum class Outcome { kRunning, kSuccess, kCollision, kTopple, kEntrapment, kTimeout };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kRunning: return "Running";
    case Outcome::kSuccess: return "Success";
    case Outcome::kCollision: return "Collision";
    case Outcome::kTopple: return "Topple";
    case Outcome::kEntrapment: return "Entrapment";
    case Outcome::kTimeout: return "Timeout";
  }
  return "?";
}

inline std::optional<Outcome> outcome_from_string(std::string_view s) {
  for (Outcome o : {Outcome::kRunning, Outcome::kSuccess, Outcome::kCollision,
                    Outcome::kTopple, Outcome::kEntrapment, Outcome::kTimeout}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

struct EpisodeConfig {
  Method method = Method::kAdventr;
  double dt = 0.1;
  int sense_every = 10;      // ticks between scans / switch evaluations
  int imu_substeps = 5;      // proprioceptive samples per tick
  int window_length = 64;
  int hysteresis_ticks = 3;
  double timeout = 120.0;
  double success_radius = 1.0;
  int entrapment_ticks = 30;
  double entrapment_ratio = 0.1;
  bool planning_enabled = true;
  bool surface_speed_cap = true;  // wheeled: slow down on costly surfaces
  bool detour_recovery = true;
  double stall_time = 6.0;        // s without stall_progress metres of progress
  double stall_progress = 0.5;
  double detour_min_time = 3.0;   // s, lower bound on one sidestep
  double detour_time = 20.0;      // s, upper bound on one sidestep
  double detour_angle = 1.5707963267948966;  // rad off the goal bearing
  Thresholds thresholds;
  PlannerConfig planner;
  PerceptionParams perception;
  LidarParams lidar;
  ElevationBounds elevation_bounds;
};

struct TickRecord {
  int tick = 0;
  double t = 0.0;
  RobotState state;          // after the step
  OdomPose odom;             // after the step
  VelocityCommand command;
  VelocityWindow window;
  double speed_scale = 1.0;
  bool sensed = false;
  SceneMetrics metrics;      // most recent evaluation
  SwitchDecision decision;   // in force during this tick
  ImuSample imu{};           // last sample of the tick
  double vibration = 0.0;    // sum of |accel - baseline| * sample dt this tick
  bool recovery = false;
  bool detour = false;
};

struct EpisodeLog {
  std::string scenario;
  Method method = Method::kAdventr;
  RobotSpec robot;
  std::uint64_t seed = 0;
  Pose2 start;
  Vec2 goal;
  double dt = 0.1;
  double tau_surf = 0.0;
  std::vector<TickRecord> ticks;
  Outcome outcome = Outcome::kRunning;
};

/// Proprioceptive rows pushed into a window for one command held over dt.
/// Returns the tick's vibration integral.
inline double sample_proprioception(const TerrainWorld& world, const RobotSpec& robot,
                                    const RobotState& state, const VelocityCommand& cmd,
                                    double dt, int substeps, std::uint64_t seed,
                                    std::uint64_t tick, SensorWindow& imu_win,
                                    SensorWindow& joint_win, ImuSample* last_imu) {
  const double sub_dt = dt / substeps;
  double vib = 0.0;
  for (int k = 0; k < substeps; ++k) {
    const std::uint64_t idx = tick * static_cast<std::uint64_t>(substeps) + k;
    const double stamp = static_cast<double>(idx) * sub_dt;
    const ImuSample s =
        simulate_imu(world, state, cmd, sub_dt, seed, idx, robot.footprint_radius);
    const ImuSample base = imu_baseline(state.roll, state.pitch, cmd.w);
    const double dev = std::sqrt((s[0] - base[0]) * (s[0] - base[0]) +
                                 (s[1] - base[1]) * (s[1] - base[1]) +
                                 (s[2] - base[2]) * (s[2] - base[2]));
    vib += dev * sub_dt;
    imu_win.push(s, stamp);
    if (robot.kind == RobotKind::kLegged) {
      joint_win.push(simulate_joints(world, state, cmd, state.gait, sub_dt, seed, idx), stamp);
    }
    if (last_imu) *last_imu = s;
  }
  return vib;
}

inline double window_metric(const RobotSpec& robot, const SensorWindow& imu_win,
                            const SensorWindow& joint_win) {
  return surface_metric(robot.kind == RobotKind::kLegged ? joint_win : imu_win);
}

/// tau_surf = 3 x the q_surf of a 2 s full-speed rollout on flat concrete.
inline double calibrate_tau_surf(const RobotSpec& robot, const EpisodeConfig& cfg = {},
                                 std::uint64_t seed = 0x0ca11b8a7eULL) {
  TerrainWorld flat;
  flat.default_surface = Surface::kConcrete;
  RobotState s;
  s.kind = robot.kind;
  s.gait = Gait::kTrot;
  SensorWindow imu_win = make_imu_window(cfg.window_length);
  SensorWindow joint_win = make_joint_window(cfg.window_length);
  const std::uint64_t cal_seed = derive_seed(seed, Stream::kCalibration);
  const VelocityCommand cmd{robot.v_max, 0.0};
  const int ticks = static_cast<int>(std::lround(2.0 / cfg.dt));
  for (int i = 0; i < ticks; ++i) {
    sample_proprioception(flat, robot, s, cmd, cfg.dt, cfg.imu_substeps, cal_seed,
                          static_cast<std::uint64_t>(i), imu_win, joint_win, nullptr);
    s = step(flat, robot, s, cmd, cfg.dt);
  }
  return 3.0 * window_metric(robot, imu_win, joint_win);
}

// ─── Stall recovery ─────────────────────────────────────────────────────────

/// True when every point of the segment inside the map keeps at least
/// `margin` clearance.
inline bool line_clear(const DistanceField& field, Vec2 from, Vec2 to, double margin) {
  const double len = distance(from, to);
  const int n = std::max(1, static_cast<int>(std::ceil(len / 0.1)));
  for (int i = 0; i <= n; ++i) {
    const Vec2 p = from + (static_cast<double>(i) / n) * (to - from);
    if (field.clearance(p.x, p.y) < margin) return false;
  }
  return true;
}

inline Vec2 detour_target(Vec2 p, Vec2 goal, int side, double angle) {
  const double bearing = std::atan2(goal.y - p.y, goal.x - p.x) + side * angle;
  return p + 10.0 * Vec2{std::cos(bearing), std::sin(bearing)};
}

/// +1 (left of the goal bearing) or -1, whichever direction stays clearer
/// over the next few metres; left on ties.
inline int detour_side_choice(const DistanceField& field, Vec2 p, Vec2 goal, double angle) {
  double best = -1.0;
  int side = 1;
  for (int s : {1, -1}) {
    const Vec2 t = detour_target(p, goal, s, angle);
    const Vec2 u = 0.1 * (t - p);
    double worst = std::numeric_limits<double>::infinity();
    for (double d = 0.5; d <= 4.0; d += 0.25) {
      const Vec2 q = p + (d / 1.0) * Vec2{u.x, u.y};
      worst = std::min(worst, field.clearance(q.x, q.y));
    }
    if (worst > best) {
      best = worst;
      side = s;
    }
  }
  return side;
}

inline bool collides(const TerrainWorld& world, const RobotSpec& robot, Vec2 p) {
  for (const RigidObstacle& o : world.obstacles) {
    if (distance(p, o.position) < robot.footprint_radius + o.radius) return true;
  }
  for (const VegetationInstance& v : world.vegetation) {
    if (v.pliable) continue;
    if (distance(p, v.position) < robot.footprint_radius + v.radius) return true;
  }
  return false;
}

struct EpisodeSetup {
  const TerrainWorld* world = nullptr;
  std::string scenario;
  Pose2 start;
  Vec2 goal;
  RobotSpec robot;
  std::uint64_t seed = 0;
  double tau_surf = 0.0;  // <= 0: calibrate
};

inline EpisodeLog run_episode(const EpisodeSetup& setup, const EpisodeConfig& cfg) {
  if (!setup.world) throw std::invalid_argument("run_episode: no world");
  const TerrainWorld& world = *setup.world;
  const RobotSpec& robot = setup.robot;
  validate(robot);
  if (const auto err = method_robot_error(cfg.method, robot.kind); !err.empty()) {
    throw std::invalid_argument(err);
  }

  EpisodeLog log;
  log.scenario = setup.scenario;
  log.method = cfg.method;
  log.robot = robot;
  log.seed = setup.seed;
  log.start = setup.start;
  log.goal = setup.goal;
  log.dt = cfg.dt;

  Thresholds th = cfg.thresholds;
  th.tau_surf = setup.tau_surf > 0.0 ? setup.tau_surf : calibrate_tau_surf(robot, cfg);
  log.tau_surf = th.tau_surf;

  const std::uint64_t ep_seed = derive_seed(setup.seed, Stream::kEpisode);
  RobotState state;
  state.x = setup.start.x;
  state.y = setup.start.y;
  state.yaw = setup.start.yaw;
  state.kind = robot.kind;
  state.gait = Gait::kTrot;
  settle_attitude(world, robot, state);
  OdomPose odom = setup.start;

  SensorWindow imu_win = make_imu_window(cfg.window_length);
  SensorWindow joint_win = make_joint_window(cfg.window_length);
  TriggerHysteresis hysteresis(cfg.hysteresis_ticks);
  const std::optional<SwitchDecision> fixed = fixed_decision(cfg.method);

  PerceptionOutputs outputs;
  SwitchDecision decision;
  SceneMetrics metrics;
  const VelocityLimits limits = limits_of(robot);
  const double inflation = robot.footprint_radius + 0.5 * cfg.perception.grid.resolution;

  const int max_ticks = static_cast<int>(std::lround(cfg.timeout / cfg.dt));
  int stuck = 0;
  double best_dist = distance(setup.start.position(), setup.goal);
  int since_progress = 0;
  int detour_side = 0;
  int detour_ticks = 0;
  const int stall_ticks = static_cast<int>(std::lround(cfg.stall_time / cfg.dt));
  const int detour_min = static_cast<int>(std::lround(cfg.detour_min_time / cfg.dt));
  const int detour_limit = static_cast<int>(std::lround(cfg.detour_time / cfg.dt));
  log.ticks.reserve(static_cast<std::size_t>(max_ticks));

  for (int tick = 0; tick < max_ticks; ++tick) {
    TickRecord rec;
    rec.tick = tick;
    rec.t = (tick + 1) * cfg.dt;

    if (tick % cfg.sense_every == 0) {
      const int eval = tick / cfg.sense_every;
      const Pose2 pose = state.pose();
      const Vec2 c = lattice_center(pose.position(), cfg.perception.grid.resolution);
      const Pose2 map_pose{c.x, c.y, pose.yaw};
      const PointCloud cloud =
          simulate_lidar(world, pose, robot.sensor_height, cfg.lidar,
                         derive_seed(ep_seed, Stream::kLidar, static_cast<std::uint64_t>(eval)),
                         tick * cfg.dt);
      const ElevationMap e_all =
          elevation_map_from_cloud(cloud, map_pose, cfg.perception.grid, cfg.elevation_bounds);
      const ElevationMap e_ground = elevation_map_from_cloud(
          cloud, map_pose, cfg.perception.grid, cfg.elevation_bounds, /*ground_only=*/true);
      const IntensityMap d = intensity_map_from_cloud(cloud, map_pose, cfg.perception.grid);

      metrics = SceneMetrics{};
      metrics.q_uneven = unevenness_metric(e_ground, &metrics.degenerate_elevation);
      metrics.q_surf = window_metric(robot, imu_win, joint_win);
      const PliabilityResult pl = pliability_metric(d, e_all, th);
      metrics.q_pliable = pl.q_pliable;
      metrics.vertical_gradient_present = pl.vertical_gradient_present;

      const TriggerFlags held = hysteresis.update(evaluate_triggers(metrics, th));
      decision = fixed ? *fixed : select_modules(held, robot.kind);

      PerceptionInputs in;
      in.world = &world;
      in.pose = pose;
      in.map_pose = map_pose;
      in.ground_elevation = &e_ground;
      in.all_elevation = &e_all;
      in.q_surf = metrics.q_surf;
      in.tau_surf = th.tau_surf;
      in.tick = tick;
      in.seed = ep_seed;
      outputs = perceive(in, decision, robot, cfg.perception);
      if (outputs.gait && robot.kind == RobotKind::kLegged) state.gait = *outputs.gait;
      rec.sensed = true;
    }
    rec.metrics = metrics;
    rec.decision = decision;

    // Speed scale: gait for legged, surface cap for wheeled TerraPN.
    double scale = 1.0;
    if (robot.kind == RobotKind::kLegged) {
      scale = gait_params(state.gait).max_speed;
    } else if (cfg.surface_speed_cap && decision.has(ModuleId::kTerraPn) &&
               outputs.surface_cost) {
      const auto c = bilinear_sample(outputs.surface_cost->grid, state.x, state.y);
      if (c) scale = 1.0 - 0.5 * (*c) / 100.0;
    }
    rec.speed_scale = scale;

    // Progress watchdog: after a stall, steer for a goal offset to one side
    // until the straight line to the real goal is clear.
    Vec2 target = setup.goal;
    if (cfg.detour_recovery && cfg.planning_enabled) {
      const double dist = distance(state.position(), setup.goal);
      if (dist < best_dist - cfg.stall_progress) {
        best_dist = dist;
        since_progress = 0;
      } else {
        ++since_progress;
      }
      if (detour_side == 0 && since_progress >= stall_ticks) {
        detour_side = detour_side_choice(outputs.clearance, state.position(), setup.goal,
                                         cfg.detour_angle);
        detour_ticks = 0;
      }
      if (detour_side != 0) {
        if (detour_ticks >= detour_limit ||
            (detour_ticks >= detour_min &&
             line_clear(outputs.clearance, state.position(), setup.goal, inflation))) {
          detour_side = 0;
          best_dist = dist;
          since_progress = 0;
        } else {
          ++detour_ticks;
          target = detour_target(state.position(), setup.goal, detour_side, cfg.detour_angle);
        }
      }
    }
    rec.detour = detour_side != 0;

    VelocityCommand cmd;
    if (cfg.planning_enabled) {
      PlanContext ctx;
      ctx.goal = target;
      ctx.outputs = &outputs;
      ctx.v_max = robot.v_max;
      ctx.inflation = inflation;
      const PlanResult pr = plan(state, ctx, limits, cfg.planner, scale);
      cmd = pr.command;
      rec.window = pr.window;
      rec.recovery = pr.recovery;
    } else {
      rec.window = dynamic_window({state.v, state.w}, limits, cfg.planner.dt_window, scale);
      cmd = {std::min(rec.window.v_hi, state.v + limits.a_v * cfg.dt), 0.0};
    }
    rec.command = cmd;

    rec.vibration = sample_proprioception(world, robot, state, cmd, cfg.dt, cfg.imu_substeps,
                                          ep_seed, static_cast<std::uint64_t>(tick), imu_win,
                                          joint_win, &rec.imu);
    state = step(world, robot, state, cmd, cfg.dt);
    odom = simulate_odometry(odom, cmd, cfg.dt);
    rec.state = state;
    rec.odom = odom;
    log.ticks.push_back(rec);

    if (std::abs(state.roll) > robot.topple_limit || std::abs(state.pitch) > robot.topple_limit) {
      log.outcome = Outcome::kTopple;
    } else if (collides(world, robot, state.position())) {
      log.outcome = Outcome::kCollision;
    } else if (distance(state.position(), setup.goal) < cfg.success_radius) {
      log.outcome = Outcome::kSuccess;
    } else {
      stuck = (cmd.v > 0.0 && state.v_actual / cmd.v < cfg.entrapment_ratio) ? stuck + 1 : 0;
      if (stuck >= cfg.entrapment_ticks) log.outcome = Outcome::kEntrapment;
    }
    if (log.outcome != Outcome::kRunning) break;
  }
  if (log.outcome == Outcome::kRunning) log.outcome = Outcome::kTimeout;
  return log;
}

// ─── Metrics ────────────────────────────────────────────────────────────────

struct EpisodeMetrics {
  bool success = false;
  Outcome outcome = Outcome::kRunning;
  double elapsed = 0.0;
  double path_length = 0.0;       // odometry-reported
  double true_path_length = 0.0;
  double mean_velocity = 0.0;     // path_length / elapsed
  double instability_cost = 0.0;
  double elevation_gradient = 0.0;  // map units (cm) of |rise| summed
  double odometry_drift = 0.0;
  double final_distance = 0.0;
};

inline EpisodeMetrics compute_metrics(const TerrainWorld& world, const EpisodeLog& log) {
  EpisodeMetrics m;
  m.outcome = log.outcome;
  m.success = log.outcome == Outcome::kSuccess;
  Vec2 prev = log.start.position();
  double h_prev = height_at(world, prev.x, prev.y);
  for (const TickRecord& r : log.ticks) {
    m.path_length += std::abs(r.command.v) * log.dt;
    const Vec2 p = r.state.position();
    m.true_path_length += distance(p, prev);
    const double h = height_at(world, p.x, p.y);
    m.elevation_gradient += std::abs(h - h_prev) * kMapUnitsPerMetre;
    m.instability_cost += r.vibration;
    prev = p;
    h_prev = h;
  }
  m.elapsed = static_cast<double>(log.ticks.size()) * log.dt;
  m.mean_velocity = m.elapsed > 0.0 ? m.path_length / m.elapsed : 0.0;
  if (!log.ticks.empty()) {
    const TickRecord& last = log.ticks.back();
    m.odometry_drift = distance(last.odom.position(), last.state.position());
  }
  m.final_distance = distance(prev, log.goal);
  return m;
}

}  // namespace outnav

#endif  // OUTNAV_SIM_HPP
