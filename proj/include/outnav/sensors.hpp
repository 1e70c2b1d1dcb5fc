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
 * sensors.hpp
 *
 * Sensor streams simulated from a TerrainWorld: ray-cast lidar with
 * intensity, IMU and joint-feedback samples with surface-dependent
 * vibration, and odometry that integrates commanded (not slipped) motion.
 *
 * Every function is a pure function of its arguments; randomness comes from
 * generators seeded with derive_seed(seed, stream, step).
 */

#ifndef OUTNAV_SENSORS_HPP
#define OUTNAV_SENSORS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "outnav/geometry.hpp"
#include "outnav/gridmap.hpp"
#include "outnav/rng.hpp"
#include "outnav/robot.hpp"
#include "outnav/world.hpp"

namespace outnav {

// ─── Lidar ──────────────────────────────────────────────────────────────────

struct PointCloud {
  std::vector<CloudPoint> points;
  double stamp = 0.0;
};

/// Spinning lidar. Downward rings are spaced so that their flat-ground
/// footprints are evenly spaced between near_range and far_range; the
/// remaining rings cover the horizon band up to upper_max_deg.
struct LidarParams {
  int n_azimuth = 180;
  int n_rings = 32;
  int n_upper_rings = 6;
  double near_range = 1.2;
  double far_range = 7.6;
  double upper_min_deg = -2.0;
  double upper_max_deg = 15.0;
  double max_range = 12.0;
  double z_noise_std = 0.01;
  double p_penetrate_tall_grass = 0.5;  // hit probability per metre
  double p_penetrate_bush = 0.15;
  double march_step = 0.15;

  std::vector<double> ring_elevations(double sensor_height) const {
    std::vector<double> out;
    const int n_down = n_rings - n_upper_rings;
    for (int i = 0; i < n_down; ++i) {
      const double r = n_down == 1 ? near_range
                                   : near_range + i * (far_range - near_range) / (n_down - 1);
      out.push_back(-std::atan2(sensor_height, r));
    }
    for (int i = 0; i < n_upper_rings; ++i) {
      const double f = n_upper_rings == 1 ? 0.0 : double(i) / (n_upper_rings - 1);
      out.push_back(deg_to_rad(upper_min_deg + f * (upper_max_deg - upper_min_deg)));
    }
    return out;
  }
};

namespace detail {

struct Cylinder {
  Vec2 center;
  double radius;
  double base;
  double top;
  double intensity;
  double penetration_rate;  // 0 for solid
};

// Ray/vertical-cylinder overlap interval in ray parameter t.
inline bool cylinder_interval(const Cylinder& c, const Eigen::Vector3d& o,
                              const Eigen::Vector3d& d, double t_max, double& t0,
                              double& t1) {
  const double ox = o.x() - c.center.x;
  const double oy = o.y() - c.center.y;
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a < 1e-12) return false;
  const double b = 2.0 * (ox * d.x() + oy * d.y());
  const double cc = ox * ox + oy * oy - c.radius * c.radius;
  const double disc = b * b - 4.0 * a * cc;
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  t0 = std::max(0.0, (-b - sq) / (2.0 * a));
  t1 = std::min(t_max, (-b + sq) / (2.0 * a));
  // Clip to below the top cap.
  if (std::abs(d.z()) < 1e-12) {
    if (o.z() > c.top) return false;
  } else {
    const double t_top = (c.top - o.z()) / d.z();
    if (d.z() > 0.0) {
      t1 = std::min(t1, t_top);
    } else {
      t0 = std::max(t0, t_top);
    }
  }
  return t0 <= t1;
}

}  // namespace detail

/// Ray-casts one full sweep from `pose`, with the sensor `sensor_height` above
/// the ground. Solid cylinders return at first contact; pliable vegetation
/// returns after an exponentially distributed penetration depth.
inline PointCloud simulate_lidar(const TerrainWorld& world, const Pose2& pose,
                                 double sensor_height, const LidarParams& params,
                                 std::uint64_t seed, double stamp = 0.0) {
  PointCloud cloud;
  cloud.stamp = stamp;
  Rng rng(derive_seed(seed, Stream::kLidar));

  const Eigen::Vector3d origin(pose.x, pose.y,
                               height_at(world, pose.x, pose.y) + sensor_height);
  const double h_max = max_height_bound(world);
  const auto rings = params.ring_elevations(sensor_height);
  const Vec2 s{pose.x, pose.y};

  std::vector<detail::Cylinder> all;
  const auto rate = [](double p) { return p <= 0.0 ? 0.0 : -std::log(1.0 - std::min(p, 0.999999)); };
  for (const RigidObstacle& o : world.obstacles) {
    const double base = height_at(world, o.position.x, o.position.y);
    all.push_back({o.position, o.radius, base, base + o.height, o.lidar_intensity, 0.0});
  }
  for (const VegetationInstance& v : world.vegetation) {
    const double base = height_at(world, v.position.x, v.position.y);
    double r = 0.0;
    if (v.pliable) {
      r = rate(v.kind == VegetationKind::kTallGrass ? params.p_penetrate_tall_grass
                                                    : params.p_penetrate_bush);
    }
    all.push_back({v.position, v.radius, base, base + v.height, v.lidar_intensity, r});
  }

  HeightField local = world.terrain;
  std::vector<detail::Cylinder> near;
  std::vector<detail::Cylinder> cands;

  // Cull to what the sweep can reach.
  for (const auto& c : all) {
    if (distance(c.center, s) <= params.max_range + c.radius) near.push_back(c);
  }

  for (int ia = 0; ia < params.n_azimuth; ++ia) {
    const double az = pose.yaw + 2.0 * std::numbers::pi * ia / params.n_azimuth;
    const Vec2 u{std::cos(az), std::sin(az)};
    const auto seg_dist = [&](Vec2 c) {
      const double t = std::clamp(dot(c - s, u), 0.0, params.max_range);
      return distance(c, s + t * u);
    };
    local.bumps.clear();
    for (const GaussianBump& b : world.terrain.bumps) {
      if (seg_dist(b.center) <= 4.5 * b.sigma) local.bumps.push_back(b);
    }
    cands.clear();
    for (const auto& c : near) {
      if (seg_dist(c.center) <= c.radius) cands.push_back(c);
    }
    const auto ground = [&](double x, double y) {
      const Vec2 p = world.bounds.clamp({x, y});
      return local.evaluate(p.x, p.y);
    };

    for (double elev : rings) {
      const Eigen::Vector3d d(std::cos(elev) * u.x, std::cos(elev) * u.y, std::sin(elev));
      double t_hit = params.max_range;
      bool hit = false;
      double intensity = 0.0;
      std::optional<double> ground_z;  // set for ground returns

      for (const auto& c : cands) {
        double t0 = 0.0, t1 = 0.0;
        if (!detail::cylinder_interval(c, origin, d, params.max_range, t0, t1)) continue;
        double t = t0;
        if (c.penetration_rate > 0.0) {
          t = t0 + rng.exponential(c.penetration_rate);
          if (t > t1) continue;
        }
        if (t < t_hit) {
          t_hit = t;
          hit = true;
          intensity = c.intensity;
        }
      }

      // March the ground up to the nearest object hit.
      const auto above = [&](double t) {
        const Eigen::Vector3d p = origin + t * d;
        return p.z() - ground(p.x(), p.y());
      };
      double prev_t = 0.0;
      for (double t = params.march_step; prev_t < t_hit; t += params.march_step) {
        const double tt = std::min(t, t_hit);
        const Eigen::Vector3d p = origin + tt * d;
        if (d.z() > 0.0 && p.z() > h_max) break;
        if (above(tt) <= 0.0) {
          double lo = prev_t, hi = tt;
          for (int k = 0; k < 8; ++k) {
            const double mid = 0.5 * (lo + hi);
            (above(mid) > 0.0 ? lo : hi) = mid;
          }
          t_hit = hi;
          hit = true;
          const Eigen::Vector3d g = origin + hi * d;
          intensity = world.surface_class(surface_at(world, g.x(), g.y())).lidar_intensity;
          ground_z = height_at(world, g.x(), g.y());
          break;
        }
        prev_t = tt;
      }
      if (!hit) continue;
      const Eigen::Vector3d p = origin + t_hit * d;
      // Range noise is clipped at 3 sigma so no return lands below the
      // terrain by more than that.
      const double sigma = params.z_noise_std;
      const double noise = std::clamp(rng.normal(0.0, sigma), -3.0 * sigma, 3.0 * sigma);
      cloud.points.push_back({p.x(), p.y(), ground_z.value_or(p.z()) + noise, intensity});
    }
  }
  return cloud;
}

// ─── Robot-centric maps from the cloud ──────────────────────────────────────

/// Normalized elevation grid plus the physical bounds that map to 0 and 100.
struct ElevationMap {
  GridMap grid;
  double lo = 0.0;
  double hi = 1.0;

  double metres_per_unit() const { return (hi - lo) / 100.0; }
};

struct ElevationBounds {
  enum class Mode { kPerFrame, kFixed };
  Mode mode = Mode::kPerFrame;
  double min_span = 1.0;  // per-frame: hi >= lo + min_span
  double fixed_lo = -1.0;
  double fixed_hi = 1.0;
};

/// Returns at or above this intensity are treated as non-ground (vegetation,
/// trunks, rocks) when building the ground-only elevation map.
inline constexpr double kGroundIntensityCeiling = 40.0;

inline ElevationMap elevation_map_from_cloud(const PointCloud& cloud, const Pose2& pose,
                                             const GridGeometry& grid,
                                             const ElevationBounds& bounds = {},
                                             bool ground_only = false) {
  std::vector<CloudPoint> pts;
  std::span<const CloudPoint> use = cloud.points;
  if (ground_only) {
    pts.reserve(cloud.points.size());
    for (const auto& p : cloud.points) {
      if (p.intensity < kGroundIntensityCeiling) pts.push_back(p);
    }
    use = pts;
  }
  const GridMap raw = map_from_points(use, grid.size_n, grid.resolution,
                                      pose.position(), Reducer::kMaxZ);
  double lo = bounds.fixed_lo;
  double hi = bounds.fixed_hi;
  if (bounds.mode == ElevationBounds::Mode::kPerFrame) {
    const auto range = valid_range(raw);
    lo = range ? range->min : 0.0;
    hi = range ? std::max(range->max, lo + bounds.min_span) : lo + bounds.min_span;
  }
  return {normalize(raw, lo, hi), lo, hi};
}

inline IntensityMap intensity_map_from_cloud(const PointCloud& cloud, const Pose2& pose,
                                             const GridGeometry& grid) {
  return map_from_points(cloud.points, grid.size_n, grid.resolution, pose.position(),
                         Reducer::kMeanIntensity);
}

// ─── Proprioception ─────────────────────────────────────────────────────────

struct VelocityCommand {
  double v = 0.0;
  double w = 0.0;
  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

inline constexpr double kGravity = 9.81;

/// Rolling M x K window of sensor rows.
class SensorWindow {
 public:
  SensorWindow(int columns, int capacity, double rate_hz)
      : columns_(columns), capacity_(capacity), rate_hz_(rate_hz) {
    if (capacity < 8) throw std::invalid_argument("SensorWindow: capacity must be >= 8");
  }

  void push(std::span<const double> row, double stamp) {
    if (static_cast<int>(row.size()) != columns_) {
      throw std::invalid_argument("SensorWindow: row width mismatch");
    }
    rows_.emplace_back(row.begin(), row.end());
    if (static_cast<int>(rows_.size()) > capacity_) rows_.pop_front();
    stamp_ = stamp;
  }

  int columns() const { return columns_; }
  int capacity() const { return capacity_; }
  int rows() const { return static_cast<int>(rows_.size()); }
  bool full() const { return rows() == capacity_; }
  double rate() const { return rate_hz_; }
  double stamp() const { return stamp_; }
  const std::vector<double>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(rows(), columns_);
    for (int i = 0; i < rows(); ++i) {
      for (int j = 0; j < columns_; ++j) m(i, j) = rows_[static_cast<std::size_t>(i)][j];
    }
    return m;
  }

 private:
  int columns_;
  int capacity_;
  double rate_hz_;
  double stamp_ = 0.0;
  std::deque<std::vector<double>> rows_;
};

inline SensorWindow make_imu_window(int m = 64, double rate_hz = 50.0) {
  return SensorWindow(6, m, rate_hz);
}
inline constexpr int kJointChannels = 12;
inline SensorWindow make_joint_window(int m = 64, double rate_hz = 50.0) {
  return SensorWindow(kJointChannels, m, rate_hz);
}

using ImuSample = std::array<double, 6>;  // ax ay az [m/s^2], wx wy wz [rad/s]

/// Noise-free reading for the given attitude and yaw rate.
inline ImuSample imu_baseline(double roll, double pitch, double yaw_rate) {
  return {kGravity * std::sin(pitch), -kGravity * std::sin(roll) * std::cos(pitch),
          kGravity * std::cos(roll) * std::cos(pitch), 0.0, 0.0, yaw_rate};
}

inline double vibration_scale(const TerrainWorld& world, const RobotState& state,
                              double speed) {
  const double gain =
      world.surface_class(surface_at(world, state.x, state.y)).vibration_gain;
  const double rough =
      state.kind == RobotKind::kLegged ? gait_params(state.gait).roughness : 1.0;
  return gain * std::abs(speed) * rough;
}

/// One IMU sample. At zero speed the sample equals imu_baseline exactly.
inline ImuSample simulate_imu(const TerrainWorld& world, const RobotState& state,
                              const VelocityCommand& command, double dt,
                              std::uint64_t seed, std::uint64_t step,
                              double footprint_radius = 0.4) {
  ImuSample s = imu_baseline(state.roll, state.pitch, command.w);
  const double speed = command.v;
  if (speed == 0.0) return s;

  // Attitude change over the next dt along the heading gives the
  // slope-coupled roll/pitch rates.
  const Vec2 p = state.position();
  const Vec2 ahead = p + (speed * dt) * Vec2{std::cos(state.yaw), std::sin(state.yaw)};
  const LocalSlope a = terrain_slope(world, p, state.yaw, footprint_radius);
  const LocalSlope b = terrain_slope(world, ahead, state.yaw, footprint_radius);
  const double pitch_rate = (std::atan(b.along) - std::atan(a.along)) / dt;
  const double roll_rate = (std::atan(b.across) - std::atan(a.across)) / dt;

  const double sigma = vibration_scale(world, state, speed);
  Rng rng(derive_seed(seed, Stream::kImu, step));
  for (int i = 0; i < 3; ++i) s[i] += rng.normal(0.0, sigma);
  s[3] += roll_rate + rng.normal(0.0, 0.5 * sigma);
  s[4] += pitch_rate + rng.normal(0.0, 0.5 * sigma);
  s[5] += rng.normal(0.0, 0.5 * sigma);
  return s;
}

using JointSample = std::array<double, kJointChannels>;

/// One joint-feedback sample for a 4-leg, 3-channel-per-leg robot:
/// (hip position, knee position, knee force proxy) per leg.
inline JointSample simulate_joints(const TerrainWorld& world, const RobotState& state,
                                   const VelocityCommand& command, Gait gait, double dt,
                                   std::uint64_t seed, std::uint64_t step) {
  static constexpr double kTrotPhase[4] = {0.0, std::numbers::pi, std::numbers::pi, 0.0};
  static constexpr double kWalkPhase[4] = {0.0, 0.5 * std::numbers::pi, std::numbers::pi,
                                           1.5 * std::numbers::pi};
  const GaitParams gp = gait_params(gait);
  const double speed = std::abs(command.v);
  const double t = static_cast<double>(step) * dt;
  const double amp = 0.05 * std::min(1.0, speed);
  const double omega = 2.0 * std::numbers::pi * gp.step_hz;
  const Surface surface = surface_at(world, state.x, state.y);
  const SurfaceClass& sc = world.surface_class(surface);
  const double sigma = sc.vibration_gain * speed * gp.roughness;
  const double sink = is_granular(surface)
                          ? 0.5 * sc.vibration_gain * std::min(1.0, speed) *
                                std::sin(2.0 * std::numbers::pi * 0.25 * t)
                          : 0.0;

  Rng rng(derive_seed(seed, Stream::kJoints, step));
  JointSample out{};
  for (int leg = 0; leg < 4; ++leg) {
    const double ph = omega * t + (gait == Gait::kTrot ? kTrotPhase[leg] : kWalkPhase[leg]);
    out[leg * 3 + 0] = amp * std::sin(ph);
    out[leg * 3 + 1] = 0.8 * amp * std::sin(ph + 0.5 * std::numbers::pi);
    out[leg * 3 + 2] = 1.0 + 0.5 * amp * std::cos(ph) + sink;
  }
  for (double& x : out) x += rng.normal(0.0, sigma);
  return out;
}

// ─── Odometry ───────────────────────────────────────────────────────────────

using OdomPose = Pose2;

/// Euler-integrates the commanded velocity; slip is invisible to odometry.
inline OdomPose simulate_odometry(const OdomPose& prev, const VelocityCommand& command,
                                  double dt) {
  return {prev.x + command.v * std::cos(prev.yaw) * dt,
          prev.y + command.v * std::sin(prev.yaw) * dt, prev.yaw + command.w * dt};
}

}  // namespace outnav

#endif  // OUTNAV_SENSORS_HPP
