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
 * perception.hpp
 *
 * Analytic stand-ins for the four perception modules. Each produces the same
 * kind of output a trained model would (a [0,100] cost map, or a gait), with
 * seeded noise in place of model error:
 *
 *   elevation cost   gradient of the normalized ground map vs. topple slope
 *   surface cost     traction prior of the true surface class + noise
 *   vegetation cost  simulated classifier (kind, confidence) per cell
 *   gait             rule on q_surf and the surface under the robot
 *
 * Occupancy and its distance field are always produced. Tall grass is an
 * obstacle unless the vegetation module is running.
 */

#ifndef OUTNAV_PERCEPTION_HPP
#define OUTNAV_PERCEPTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "outnav/gridmap.hpp"
#include "outnav/rng.hpp"
#include "outnav/robot.hpp"
#include "outnav/sensors.hpp"
#include "outnav/switching.hpp"
#include "outnav/world.hpp"

namespace outnav {

struct CostMap {
  GridMap grid;
  ModuleId module = ModuleId::kTerp;
  int tick = 0;
};

// ─── Elevation ──────────────────────────────────────────────────────────────

/// Gradient (map units per cell) that corresponds to a slope of the topple
/// angle under the map's normalization.
inline double topple_gradient(const ElevationMap& e, double topple_limit) {
  const double span = e.hi - e.lo;
  if (!(span > 0.0)) return std::numeric_limits<double>::infinity();
  return std::tan(topple_limit) * e.grid.resolution() * 100.0 / span;
}

inline double elevation_cost_value(double gradient, double g_max) {
  if (!(g_max > 0.0) || std::isinf(g_max)) return 0.0;
  return 100.0 * std::min(1.0, std::pow(gradient / g_max, 1.5));
}

inline GridMap elevation_cost_grid(const ElevationMap& e, double topple_limit) {
  const GradientMap g = gradient_map(e.grid);
  const double g_max = topple_gradient(e, topple_limit);
  GridMap out = g.blank_like();
  for (int r = 0; r < g.size(); ++r) {
    for (int c = 0; c < g.size(); ++c) {
      if (g.valid(r, c)) out.set(r, c, elevation_cost_value(g.value(r, c), g_max));
    }
  }
  return out;
}

inline CostMap elevation_cost_map(const ElevationMap& e, const RobotSpec& robot,
                                  int tick = 0) {
  return {elevation_cost_grid(e, robot.topple_limit), ModuleId::kTerp, tick};
}

// ─── Surface ────────────────────────────────────────────────────────────────

inline GridMap surface_cost_grid(const TerrainWorld& world, const Pose2& pose,
                                 const GridGeometry& geom, std::uint64_t noise_seed,
                                 double noise_std = 5.0) {
  GridMap out(geom.size_n, geom.resolution, pose.position());
  Rng rng(derive_seed(noise_seed, Stream::kSurfaceNoise));
  for (int r = 0; r < out.size(); ++r) {
    for (int c = 0; c < out.size(); ++c) {
      const Vec2 p = out.cell_center(r, c);
      const double base = world.surface_class(surface_at(world, p.x, p.y)).traction_cost;
      // Noise is clipped at 3 sigma, so a cell never strays further than
      // that from its class prior.
      const double noise = std::clamp(rng.normal(0.0, noise_std), -3.0 * noise_std, 3.0 * noise_std);
      out.set(r, c, std::clamp(base + noise, 0.0, 100.0));
    }
  }
  return out;
}

inline CostMap surface_cost_map(const TerrainWorld& world, const Pose2& pose,
                                const GridGeometry& geom, RobotKind kind,
                                std::uint64_t noise_seed, int tick = 0,
                                double noise_std = 5.0) {
  return {surface_cost_grid(world, pose, geom, noise_seed, noise_std),
          surface_module_for(kind), tick};
}

inline Gait gait_recommendation(double q_surf, double tau_surf, Surface surface) {
  if (q_surf > 2.0 * tau_surf || surface == Surface::kRocks || surface == Surface::kMud) {
    return Gait::kStableSlow;
  }
  if (q_surf > tau_surf || surface == Surface::kSand || surface == Surface::kMulch) {
    return Gait::kAmble;
  }
  return Gait::kTrot;
}

// ─── Vegetation ─────────────────────────────────────────────────────────────

struct VegetationParams {
  double misclassification_rate = 0.1;
  double confidence_lo = 0.6;
  double confidence_hi = 1.0;
  std::array<double, 3> base_cost = {10.0, 50.0, 100.0};  // TallGrass, Bush, Tree
};

struct Classification {
  VegetationKind kind;
  double confidence;
};

/// Simulated classifier for one vegetated cell. Always consumes three draws so
/// the stream stays aligned whatever the outcome.
inline Classification classify_vegetation(VegetationKind truth, const VegetationParams& p,
                                          Rng& rng) {
  const double u = rng.uniform();
  const int other = rng.uniform_int(0, 1);
  const double conf = rng.uniform(p.confidence_lo, p.confidence_hi);
  VegetationKind kind = truth;
  if (u < p.misclassification_rate) {
    const int t = static_cast<int>(truth);
    kind = static_cast<VegetationKind>((t + 1 + other) % 3);
  }
  return {kind, conf};
}

inline double vegetation_cost_value(VegetationKind kind, double confidence,
                                    const VegetationParams& p) {
  return std::clamp(p.base_cost[static_cast<std::size_t>(kind)] * (2.0 - confidence), 0.0,
                    100.0);
}

/// `e_all` is the elevation map over every return; the vegetation height at a
/// cell is its de-normalized value minus the true ground there.
inline GridMap vegetation_cost_grid(const TerrainWorld& world, const ElevationMap& e_all,
                                    const Pose2& pose, const GridGeometry& geom,
                                    double sensor_height, std::uint64_t classifier_seed,
                                    const VegetationParams& params = {}) {
  GridMap out(geom.size_n, geom.resolution, pose.position());
  Rng rng(derive_seed(classifier_seed, Stream::kClassifier));
  const double unit = e_all.metres_per_unit();
  for (int r = 0; r < out.size(); ++r) {
    for (int c = 0; c < out.size(); ++c) {
      const Vec2 p = out.cell_center(r, c);
      const VegetationInstance* v = vegetation_at(world, p.x, p.y);
      if (!v) {
        out.set(r, c, 0.0);
        continue;
      }
      Classification cls = classify_vegetation(v->kind, params, rng);
      const auto ec = e_all.grid.cell_at(p.x, p.y);
      if (ec && e_all.grid.valid(*ec)) {
        const double top = e_all.lo + e_all.grid.value(*ec) * unit;
        if (top - height_at(world, p.x, p.y) > sensor_height) {
          cls.confidence = params.confidence_lo;
        }
      }
      out.set(r, c, vegetation_cost_value(cls.kind, cls.confidence, params));
    }
  }
  return out;
}

// ─── Occupancy ──────────────────────────────────────────────────────────────

inline bool occupies(const VegetationInstance& v, bool vegetation_module_active) {
  return v.kind != VegetationKind::kTallGrass || !vegetation_module_active;
}

/// 1 = untraversable, 0 = free; every cell is valid. A cell is occupied when
/// its center lies within radius + half a cell of an occupying object.
inline GridMap occupancy_map(const TerrainWorld& world, const Pose2& pose,
                             const GridGeometry& geom, bool vegetation_module_active) {
  GridMap out(geom.size_n, geom.resolution, pose.position());
  for (int r = 0; r < out.size(); ++r) {
    for (int c = 0; c < out.size(); ++c) out.set(r, c, 0.0);
  }
  const double pad = 0.5 * geom.resolution;
  const auto stamp = [&](Vec2 center, double radius) {
    const double reach = radius + pad;
    for (int r = 0; r < out.size(); ++r) {
      const double y = out.cell_center(r, 0).y;
      if (std::abs(y - center.y) > reach) continue;
      for (int c = 0; c < out.size(); ++c) {
        if (distance(out.cell_center(r, c), center) <= reach) out.set(r, c, 1.0);
      }
    }
  };
  for (const RigidObstacle& o : world.obstacles) stamp(o.position, o.radius);
  for (const VegetationInstance& v : world.vegetation) {
    if (occupies(v, vegetation_module_active)) stamp(v.position, v.radius);
  }
  return out;
}

/// Squared Euclidean distance (in cells) from every cell to the nearest
/// occupied cell, by the separable lower-envelope transform.
class DistanceField {
 public:
  DistanceField() = default;

  explicit DistanceField(const GridMap& occupancy)
      : n_(occupancy.size()), res_(occupancy.resolution()), ll_(occupancy.lower_left()) {
    const double inf = std::numeric_limits<double>::infinity();
    d2_.assign(static_cast<std::size_t>(n_) * n_, inf);
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) {
        if (occupancy.valid(r, c) && occupancy.value(r, c) != 0.0) at(r, c) = 0.0;
      }
    }
    std::vector<double> f(n_), d(n_);
    for (int c = 0; c < n_; ++c) {
      for (int r = 0; r < n_; ++r) f[r] = at(r, c);
      transform_1d(f, d);
      for (int r = 0; r < n_; ++r) at(r, c) = d[r];
    }
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) f[c] = at(r, c);
      transform_1d(f, d);
      for (int c = 0; c < n_; ++c) at(r, c) = d[c];
    }
  }

  int size() const { return n_; }
  double squared_cells(int r, int c) const {
    return d2_[static_cast<std::size_t>(r) * n_ + c];
  }

  /// Metres from the cell center nearest (x, y) to the nearest occupied cell
  /// center; +inf outside the grid or with nothing occupied.
  double cell_clearance(double x, double y) const {
    const double fc = std::floor((x - ll_.x) / res_);
    const double fr = std::floor((y - ll_.y) / res_);
    if (!(fc >= 0.0 && fr >= 0.0 && fc < n_ && fr < n_)) {
      return std::numeric_limits<double>::infinity();
    }
    return std::sqrt(squared_cells(static_cast<int>(fr), static_cast<int>(fc))) * res_;
  }

  /// Bilinear blend of the four surrounding cell-center clearances (clamped
  /// at the border); +inf outside the grid or with nothing occupied.
  double clearance(double x, double y) const {
    const double cx = (x - ll_.x) / res_;
    const double cy = (y - ll_.y) / res_;
    if (!(cx >= 0.0 && cy >= 0.0 && cx < n_ && cy < n_)) {
      return std::numeric_limits<double>::infinity();
    }
    const double u = cx - 0.5;
    const double w = cy - 0.5;
    const int c0 = static_cast<int>(std::floor(u));
    const int r0 = static_cast<int>(std::floor(w));
    const double tu = u - c0;
    const double tw = w - r0;
    const auto d = [&](int r, int c) {
      r = std::clamp(r, 0, n_ - 1);
      c = std::clamp(c, 0, n_ - 1);
      return std::sqrt(squared_cells(r, c)) * res_;
    };
    const double a = d(r0, c0), b = d(r0, c0 + 1), e = d(r0 + 1, c0), f = d(r0 + 1, c0 + 1);
    if (std::isinf(a) || std::isinf(b) || std::isinf(e) || std::isinf(f)) {
      return std::numeric_limits<double>::infinity();
    }
    return (1 - tw) * ((1 - tu) * a + tu * b) + tw * ((1 - tu) * e + tu * f);
  }

 private:
  double& at(int r, int c) { return d2_[static_cast<std::size_t>(r) * n_ + c]; }

  static void transform_1d(const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
      if (std::isinf(f[q])) continue;
      if (k < 0) {
        k = 0;
        v[0] = q;
        z[0] = -inf;
        z[1] = inf;
        continue;
      }
      double s = 0.0;
      for (;;) {
        const int p = v[k];
        s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
        if (s <= z[k] && k > 0) {
          --k;
        } else {
          break;
        }
      }
      if (s <= z[k]) {
        // k == 0 and the new parabola dominates everywhere.
        v[0] = q;
        z[0] = -inf;
        z[1] = inf;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = inf;
    }
    if (k < 0) {
      std::fill(d.begin(), d.end(), inf);
      return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (z[j + 1] < q) ++j;
      const double dq = q - v[j];
      d[q] = dq * dq + f[v[j]];
    }
  }

  int n_ = 0;
  double res_ = 1.0;
  Vec2 ll_{};
  std::vector<double> d2_;
};

// ─── Assembly ───────────────────────────────────────────────────────────────

struct PerceptionOutputs {
  std::optional<CostMap> elevation_cost;
  std::optional<CostMap> surface_cost;
  std::optional<CostMap> vegetation_cost;
  GridMap occupancy;
  DistanceField clearance;
  std::optional<Gait> gait;
};

struct PerceptionParams {
  GridGeometry grid;
  double surface_noise_std = 5.0;
  VegetationParams vegetation;
};

struct PerceptionInputs {
  const TerrainWorld* world = nullptr;
  Pose2 pose;             // robot pose; the surface under it drives the gait
  Pose2 map_pose;         // grid center, normally lattice-snapped
  const ElevationMap* ground_elevation = nullptr;  // ground returns only
  const ElevationMap* all_elevation = nullptr;     // every return
  double q_surf = 0.0;
  double tau_surf = 1.0;
  int tick = 0;
  std::uint64_t seed = 0;  // episode seed; per-tick streams are derived
};

/// Runs exactly the modules in `decision`. Cost maps are present iff their
/// module is active.
inline PerceptionOutputs perceive(const PerceptionInputs& in, const SwitchDecision& decision,
                                  const RobotSpec& robot, const PerceptionParams& params = {}) {
  const TerrainWorld& world = *in.world;
  const auto tick_seed = [&](Stream s) {
    return derive_seed(in.seed, s, static_cast<std::uint64_t>(in.tick));
  };
  PerceptionOutputs out;
  if (decision.has(ModuleId::kTerp)) {
    out.elevation_cost = elevation_cost_map(*in.ground_elevation, robot, in.tick);
  }
  if (decision.has(ModuleId::kTerraPn) || decision.has(ModuleId::kProNav)) {
    out.surface_cost =
        surface_cost_map(world, in.map_pose, params.grid, robot.kind,
                         tick_seed(Stream::kSurfaceNoise), in.tick, params.surface_noise_std);
  }
  if (decision.has(ModuleId::kProNav)) {
    out.gait = gait_recommendation(in.q_surf, in.tau_surf, surface_at(world, in.pose.x, in.pose.y));
  }
  const bool vern = decision.has(ModuleId::kVern);
  if (vern) {
    out.vegetation_cost = CostMap{
        vegetation_cost_grid(world, *in.all_elevation, in.map_pose, params.grid,
                             robot.sensor_height, tick_seed(Stream::kClassifier),
                             params.vegetation),
        ModuleId::kVern, in.tick};
  }
  out.occupancy = occupancy_map(world, in.map_pose, params.grid, vern);
  out.clearance = DistanceField(out.occupancy);
  return out;
}

}  // namespace outnav

#endif  // OUTNAV_PERCEPTION_HPP
