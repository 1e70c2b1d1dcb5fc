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
 * planner.hpp
 *
 * Dynamic-window local planner. Samples an nv x nw grid of reachable
 * (v, w) pairs, rolls each out as a constant-velocity arc and scores it:
 *
 *   score = a*Head*(1 - Surface) + b*Obs + g*Vel + d*Elevation + t*Veg
 *
 * Surface is a normalized cost; Elevation and Veg are benefits (1 - cost), so
 * every weight is nonnegative and larger is better. A module that is not
 * running contributes a constant (Surface 0, Elevation 1, Veg 1).
 */

#ifndef OUTNAV_PLANNER_HPP
#define OUTNAV_PLANNER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "outnav/geometry.hpp"
#include "outnav/gridmap.hpp"
#include "outnav/perception.hpp"
#include "outnav/robot.hpp"
#include "outnav/sensors.hpp"

namespace outnav {

struct Weights {
  double alpha = 1.0;  // heading
  double beta = 0.6;   // clearance
  double gamma = 0.3;  // velocity
  double delta = 0.8;  // elevation
  double theta = 0.8;  // vegetation
};

struct VelocityLimits {
  double v_max = 1.0;
  double w_max = 1.0;
  double a_v = 0.5;
  double a_w = 1.5;
};

inline VelocityLimits limits_of(const RobotSpec& r) { return {r.v_max, r.w_max, r.a_v, r.a_w}; }

struct VelocityWindow {
  double v_lo = 0.0;
  double v_hi = 0.0;
  double w_lo = 0.0;
  double w_hi = 0.0;
};

/// Velocities reachable within dt_window. `speed_scale` (gait or surface
/// speed cap, <= 1) shrinks both the top speed and the forward acceleration;
/// braking is never scaled. When already faster than the scaled top speed
/// the window collapses to the hardest-braking speed.
inline VelocityWindow dynamic_window(const VelocityCommand& current,
                                     const VelocityLimits& lim, double dt_window,
                                     double speed_scale = 1.0) {
  VelocityWindow w;
  w.v_lo = std::max(0.0, current.v - lim.a_v * dt_window);
  w.v_hi = std::min(lim.v_max * speed_scale, current.v + lim.a_v * speed_scale * dt_window);
  if (w.v_lo > w.v_hi) w.v_hi = w.v_lo;
  w.w_lo = std::max(-lim.w_max, current.w - lim.a_w * dt_window);
  w.w_hi = std::min(lim.w_max, current.w + lim.a_w * dt_window);
  if (w.w_lo > w.w_hi) w.w_hi = w.w_lo;
  return w;
}

struct TrajectoryPoint {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double t = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Unicycle Euler rollout; includes the start pose, so it has
/// round(horizon/dt) + 1 points.
inline Trajectory rollout(const Pose2& start, const VelocityCommand& cmd, double horizon,
                          double dt) {
  const int steps = static_cast<int>(std::lround(horizon / dt));
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  TrajectoryPoint p{start.x, start.y, start.yaw, 0.0};
  traj.push_back(p);
  for (int k = 1; k <= steps; ++k) {
    p.x += cmd.v * std::cos(p.yaw) * dt;
    p.y += cmd.v * std::sin(p.yaw) * dt;
    p.yaw += cmd.w * dt;
    p.t = k * dt;
    traj.push_back(p);
  }
  return traj;
}

enum class CostSampling { kAlongArc, kEndpoint };

struct PlannerConfig {
  Weights weights;
  int nv = 11;
  int nw = 21;
  double horizon = 2.0;
  double dt = 0.1;
  double dt_window = 0.5;
  double clearance_cap = 1.5;
  double goal_head_radius = 1.0;
  CostSampling sampling = CostSampling::kAlongArc;
};

struct ObjectiveTerms {
  double head = 0.0;
  double obs = 0.0;
  double vel = 0.0;
  double surface = 0.0;
  double elevation = 1.0;
  double veg = 1.0;
  bool rejected = false;
};

namespace detail {

// Mean of cost/100 over the sampled poses that land on a valid cell;
// nullopt when none do.
inline std::optional<double> mean_cost(const GridMap& map, const Trajectory& traj,
                                       CostSampling sampling) {
  double sum = 0.0;
  int n = 0;
  const std::size_t first = sampling == CostSampling::kEndpoint ? traj.size() - 1 : 1;
  for (std::size_t k = first; k < traj.size(); ++k) {
    const auto s = bilinear_sample(map, traj[k].x, traj[k].y);
    if (!s) continue;
    sum += *s;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n / 100.0;
}

}  // namespace detail

/// Context shared by every sample of one planning call.
struct PlanContext {
  Vec2 goal;
  const PerceptionOutputs* outputs = nullptr;
  double v_max = 1.0;            // robot's absolute top speed, for Vel
  double inflation = 0.525;      // footprint radius + half a cell
};

inline ObjectiveTerms objective_terms(const VelocityCommand& cmd, const Trajectory& traj,
                                      const PlanContext& ctx, const PlannerConfig& cfg) {
  ObjectiveTerms t;
  const TrajectoryPoint& end = traj.back();
  const double start_dist = distance({traj.front().x, traj.front().y}, ctx.goal);
  if (start_dist < cfg.goal_head_radius) {
    const double end_dist = distance({end.x, end.y}, ctx.goal);
    t.head = std::clamp(1.0 - end_dist / cfg.goal_head_radius, 0.0, 1.0);
  } else {
    const double bearing = std::atan2(ctx.goal.y - end.y, ctx.goal.x - end.x);
    t.head = 1.0 - std::abs(wrap_angle(bearing - end.yaw)) / std::numbers::pi;
  }

  const PerceptionOutputs& out = *ctx.outputs;
  const double d0 = out.clearance.clearance(traj.front().x, traj.front().y);
  double min_d = d0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double d = out.clearance.clearance(traj[k].x, traj[k].y);
    // Poses inside the inflated obstacle are fatal unless the robot is
    // already that close and the arc does not bring it any closer.
    if (d < ctx.inflation && d < d0) t.rejected = true;
    min_d = std::min(min_d, d);
  }
  t.obs = std::min(1.0, min_d / cfg.clearance_cap);
  t.vel = cmd.v / ctx.v_max;

  if (out.surface_cost) {
    t.surface = detail::mean_cost(out.surface_cost->grid, traj, cfg.sampling).value_or(0.0);
  }
  if (out.elevation_cost) {
    t.elevation =
        1.0 - detail::mean_cost(out.elevation_cost->grid, traj, cfg.sampling).value_or(0.0);
  }
  if (out.vegetation_cost) {
    t.veg = 1.0 - detail::mean_cost(out.vegetation_cost->grid, traj, cfg.sampling).value_or(0.0);
  }
  return t;
}

inline double combine(const ObjectiveTerms& t, const Weights& w) {
  if (t.rejected) return -std::numeric_limits<double>::infinity();
  return w.alpha * t.head * (1.0 - t.surface) + w.beta * t.obs + w.gamma * t.vel +
         w.delta * t.elevation + w.theta * t.veg;
}

inline double objective(const VelocityCommand& cmd, const Trajectory& traj,
                        const PlanContext& ctx, const PlannerConfig& cfg) {
  return combine(objective_terms(cmd, traj, ctx, cfg), cfg.weights);
}

/// Sample i of n spanning [lo, hi] inclusive.
inline double grid_value(double lo, double hi, int i, int n) {
  if (n == 1) return lo;
  return i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
}

struct PlanResult {
  VelocityCommand command;
  VelocityWindow window;
  double score = 0.0;
  bool recovery = false;
};

/// Exhaustive argmax over the window grid. Ties: higher v, then smaller |w|,
/// then lower flat index (v-major).
inline PlanResult plan(const RobotState& state, const PlanContext& ctx,
                       const VelocityLimits& limits, const PlannerConfig& cfg,
                       double speed_scale = 1.0) {
  if (cfg.nv < 2 || cfg.nw < 2) throw std::invalid_argument("plan: grid must be >= 2x2");
  PlanResult best;
  best.window = dynamic_window({state.v, state.w}, limits, cfg.dt_window, speed_scale);
  const VelocityWindow& win = best.window;
  bool found = false;
  const Pose2 start = state.pose();
  for (int i = 0; i < cfg.nv; ++i) {
    const double v = grid_value(win.v_lo, win.v_hi, i, cfg.nv);
    for (int j = 0; j < cfg.nw; ++j) {
      const double w = grid_value(win.w_lo, win.w_hi, j, cfg.nw);
      const VelocityCommand cmd{v, w};
      const double score = objective(cmd, rollout(start, cmd, cfg.horizon, cfg.dt), ctx, cfg);
      if (std::isinf(score) && score < 0.0) continue;
      bool better = !found || score > best.score;
      if (found && score == best.score) {
        if (v != best.command.v) {
          better = v > best.command.v;
        } else {
          better = std::abs(w) < std::abs(best.command.w);
        }
      }
      if (better) {
        best.command = cmd;
        best.score = score;
        found = true;
      }
    }
  }
  if (!found) {
    best.command = {0.0, 0.5 * limits.w_max};
    best.score = -std::numeric_limits<double>::infinity();
    best.recovery = true;
  }
  return best;
}

}  // namespace outnav

#endif  // OUTNAV_PLANNER_HPP
