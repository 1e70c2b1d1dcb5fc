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

// Continuous ground-truth world: analytic heightfield, surface regions,
// vegetation cylinders and rigid obstacles. Immutable once built.

#ifndef OUTNAV_WORLD_HPP
#define OUTNAV_WORLD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "outnav/geometry.hpp"

namespace outnav {

enum class Surface { kAsphalt, kConcrete, kGrass, kMulch, kMud, kSand, kRocks };

inline constexpr std::array<Surface, 7> kAllSurfaces = {
    Surface::kAsphalt, Surface::kConcrete, Surface::kGrass, Surface::kMulch,
    Surface::kMud,     Surface::kSand,     Surface::kRocks};

inline std::string_view to_string(Surface s) {
  switch (s) {
    case Surface::kAsphalt: return "Asphalt";
    case Surface::kConcrete: return "Concrete";
    case Surface::kGrass: return "Grass";
    case Surface::kMulch: return "Mulch";
    case Surface::kMud: return "Mud";
    case Surface::kSand: return "Sand";
    case Surface::kRocks: return "Rocks";
  }
  return "?";
}

inline std::optional<Surface> surface_from_string(std::string_view name) {
  for (Surface s : kAllSurfaces) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

/// Per-class terrain coefficients.
struct SurfaceClass {
  Surface id = Surface::kGrass;
  double vibration_gain = 0.0;  // IMU vibration std per m/s of speed
  double slip_ratio = 0.0;      // fraction of commanded speed lost, [0,1)
  double traction_cost = 0.0;   // surface cost prior, [0,100]
  double lidar_intensity = 0.0; // ground return intensity, below the pliable band
};

inline bool is_granular(Surface s) {
  return s == Surface::kSand || s == Surface::kMud || s == Surface::kRocks;
}

using SurfaceTable = std::array<SurfaceClass, 7>;

inline SurfaceTable default_surface_table() {
  return {{
      {Surface::kAsphalt, 0.05, 0.02, 5.0, 10.0},
      {Surface::kConcrete, 0.08, 0.03, 8.0, 15.0},
      {Surface::kGrass, 0.20, 0.08, 20.0, 25.0},
      {Surface::kMulch, 0.35, 0.15, 35.0, 20.0},
      {Surface::kMud, 0.50, 0.45, 60.0, 12.0},
      {Surface::kSand, 0.60, 0.35, 65.0, 30.0},
      {Surface::kRocks, 0.90, 0.25, 80.0, 35.0},
  }};
}

inline void validate_surface_table(const SurfaceTable& table) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    const SurfaceClass& s = table[i];
    if (static_cast<std::size_t>(s.id) != i) {
      throw std::invalid_argument("surface table out of order");
    }
    if (!(s.vibration_gain >= 0.0) || !(s.slip_ratio >= 0.0 && s.slip_ratio < 1.0) ||
        !(s.traction_cost >= 0.0 && s.traction_cost <= 100.0) ||
        !(s.lidar_intensity >= 0.0 && s.lidar_intensity <= 100.0)) {
      throw std::invalid_argument("surface table: coefficient out of range for " +
                                  std::string(to_string(s.id)));
    }
  }
}

// ─── Vegetation and obstacles ───────────────────────────────────────────────

enum class VegetationKind { kTallGrass, kBush, kTree };

inline std::string_view to_string(VegetationKind k) {
  switch (k) {
    case VegetationKind::kTallGrass: return "TallGrass";
    case VegetationKind::kBush: return "Bush";
    case VegetationKind::kTree: return "Tree";
  }
  return "?";
}

inline std::optional<VegetationKind> vegetation_kind_from_string(std::string_view s) {
  for (auto k : {VegetationKind::kTallGrass, VegetationKind::kBush,
                 VegetationKind::kTree}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct VegetationInstance {
  VegetationKind kind = VegetationKind::kTallGrass;
  Vec2 position{};
  double radius = 1.0;
  double height = 1.0;
  bool pliable = true;
  double lidar_intensity = 55.0;
};

/// Throws if the instance breaks the per-kind pliability/intensity rules.
inline void validate(const VegetationInstance& v) {
  if (!(v.radius > 0.0) || !(v.height > 0.0)) {
    throw std::invalid_argument("vegetation: radius and height must be > 0");
  }
  if (v.kind == VegetationKind::kTree && v.pliable) {
    throw std::invalid_argument("vegetation: trees are never pliable");
  }
  if (v.kind == VegetationKind::kTallGrass && !v.pliable) {
    throw std::invalid_argument("vegetation: tall grass is always pliable");
  }
  if (v.pliable && !(v.lidar_intensity >= 40.0 && v.lidar_intensity <= 70.0)) {
    throw std::invalid_argument("vegetation: pliable intensity must be in [40,70]");
  }
  if (v.kind == VegetationKind::kTree &&
      !(v.lidar_intensity >= 80.0 && v.lidar_intensity <= 100.0)) {
    throw std::invalid_argument("vegetation: tree intensity must be in [80,100]");
  }
}

struct RigidObstacle {
  Vec2 position{};
  double radius = 0.5;
  double height = 1.0;
  double lidar_intensity = 85.0;
};

// ─── Regions ────────────────────────────────────────────────────────────────

struct Disk {
  Vec2 center{};
  double radius = 1.0;
};

struct Polygon {
  std::vector<Vec2> vertices;
};

using RegionShape = std::variant<Disk, Polygon>;

struct SurfaceRegion {
  RegionShape shape;
  Surface surface = Surface::kGrass;
};

inline bool contains(const Disk& d, Vec2 p) {
  const double dx = p.x - d.center.x;
  const double dy = p.y - d.center.y;
  return dx * dx + dy * dy <= d.radius * d.radius;
}

// Even-odd rule.
inline bool contains(const Polygon& poly, Vec2 p) {
  const auto& v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross =
          (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline bool contains(const RegionShape& shape, Vec2 p) {
  return std::visit([&](const auto& s) { return contains(s, p); }, shape);
}

inline Polygon rectangle(double x0, double y0, double x1, double y1) {
  return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

// ─── Heightfield ────────────────────────────────────────────────────────────

struct GaussianBump {
  Vec2 center{};
  double amplitude = 0.5;
  double sigma = 1.0;
};

/// Half-plane step: rises by `height` across the line through `point` with
/// unit normal at angle `normal_angle`. `width` > 0 spreads the rise linearly.
struct StepEdge {
  Vec2 point{};
  double normal_angle = 0.0;
  double height = 0.2;
  double width = 0.0;
};

struct HeightField {
  double base = 0.0;
  double slope_x = 0.0;
  double slope_y = 0.0;
  std::vector<GaussianBump> bumps;
  std::vector<StepEdge> steps;

  double evaluate(double x, double y) const {
    double h = base + slope_x * x + slope_y * y;
    for (const GaussianBump& b : bumps) {
      const double dx = x - b.center.x;
      const double dy = y - b.center.y;
      h += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
    }
    for (const StepEdge& s : steps) {
      const double d = std::cos(s.normal_angle) * (x - s.point.x) +
                       std::sin(s.normal_angle) * (y - s.point.y);
      if (s.width <= 0.0) {
        if (d >= 0.0) h += s.height;
      } else {
        h += s.height * std::clamp(d / s.width + 0.5, 0.0, 1.0);
      }
    }
    return h;
  }
};

struct Bounds {
  double x_min = -20.0;
  double x_max = 40.0;
  double y_min = -20.0;
  double y_max = 20.0;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Vec2 clamp(Vec2 p) const {
    return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
  }
};

struct TerrainWorld {
  Bounds bounds;
  HeightField terrain;
  std::vector<SurfaceRegion> regions;
  Surface default_surface = Surface::kGrass;
  SurfaceTable surfaces = default_surface_table();
  std::vector<VegetationInstance> vegetation;
  std::vector<RigidObstacle> obstacles;
  std::uint64_t seed = 0;

  const SurfaceClass& surface_class(Surface s) const {
    return surfaces[static_cast<std::size_t>(s)];
  }
};

/// Terrain height; queries outside the bounds are clamped onto the boundary.
inline double height_at(const TerrainWorld& world, double x, double y) {
  const Vec2 p = world.bounds.clamp({x, y});
  return world.terrain.evaluate(p.x, p.y);
}

/// Last-declared region containing the point wins; default class otherwise.
inline Surface surface_at(const TerrainWorld& world, double x, double y) {
  const Vec2 p{x, y};
  for (auto it = world.regions.rbegin(); it != world.regions.rend(); ++it) {
    if (contains(it->shape, p)) return it->surface;
  }
  return world.default_surface;
}

/// Nearest vegetation instance whose disk contains the point; list order
/// breaks distance ties.
inline const VegetationInstance* vegetation_at(const TerrainWorld& world,
                                               double x, double y) {
  const VegetationInstance* best = nullptr;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const VegetationInstance& v : world.vegetation) {
    const double dx = x - v.position.x;
    const double dy = y - v.position.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 <= v.radius * v.radius && d2 < best_d2) {
      best = &v;
      best_d2 = d2;
    }
  }
  return best;
}

/// Upper bound on terrain height inside the bounds.
inline double max_height_bound(const TerrainWorld& world) {
  const Bounds& b = world.bounds;
  const HeightField& t = world.terrain;
  double h = t.base + std::max(t.slope_x * b.x_min, t.slope_x * b.x_max) +
             std::max(t.slope_y * b.y_min, t.slope_y * b.y_max);
  for (const auto& bump : t.bumps) h += std::max(0.0, bump.amplitude);
  for (const auto& s : t.steps) h += std::max(0.0, s.height);
  return h;
}

/// Slopes (rise over run) along and across `heading`, measured by central
/// differences over +/- half_span. Used for footprint-averaged attitude.
struct LocalSlope {
  double along = 0.0;
  double across = 0.0;
};

inline LocalSlope terrain_slope(const TerrainWorld& world, Vec2 p, double heading,
                                double half_span) {
  const Vec2 u{std::cos(heading), std::sin(heading)};
  const Vec2 n{-u.y, u.x};
  const auto h = [&](Vec2 q) { return height_at(world, q.x, q.y); };
  return {
      (h(p + half_span * u) - h(p - half_span * u)) / (2.0 * half_span),
      (h(p + half_span * n) - h(p - half_span * n)) / (2.0 * half_span),
  };
}

}  // namespace outnav

#endif  // OUTNAV_WORLD_HPP
