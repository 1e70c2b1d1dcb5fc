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

// Tests for world.hpp and the built-in scenarios.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <gtest/gtest.h>
#include "outnav/scenarios.hpp"
#include "outnav/world.hpp"

namespace outnav {
namespace {

TEST(HeightAt, Examples) {
  TerrainWorld flat;
  EXPECT_EQ(height_at(flat, 3.0, -7.0), 0.0);

  TerrainWorld w;
  w.terrain.slope_x = 0.1;
  EXPECT_NEAR(height_at(w, 1.0, 0.0) - height_at(w, 0.0, 0.0), 0.1, 1e-15);
  w.terrain.bumps.push_back({{0.0, 0.0}, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(height_at(w, 0.0, 0.0), 0.5);
  // Independent evaluation one sigma out along y.
  EXPECT_DOUBLE_EQ(height_at(w, 0.0, 1.0), 0.5 * std::exp(-0.5));
  EXPECT_EQ(height_at(w, 2.5, 1.5), height_at(w, 2.5, 1.5));
}

TEST(HeightAt, ClampedOutsideBounds) {
  TerrainWorld w;
  w.bounds = {-1.0, 1.0, -1.0, 1.0};
  w.terrain.slope_x = 1.0;
  EXPECT_EQ(height_at(w, 5.0, 0.0), 1.0);
  EXPECT_EQ(height_at(w, -5.0, 0.0), -1.0);
}

TEST(HeightAt, StepEdge) {
  TerrainWorld w;
  w.terrain.steps.push_back({{5.0, 0.0}, 0.0, 0.2, 0.0});
  EXPECT_EQ(height_at(w, 4.99, 0.0), 0.0);
  EXPECT_EQ(height_at(w, 5.0, 3.0), 0.2);
}

TEST(SurfaceAt, Regions) {
  TerrainWorld w;
  w.regions.push_back({Disk{{0.0, 0.0}, 2.0}, Surface::kSand});
  w.regions.push_back({rectangle(1.0, -1.0, 3.0, 1.0), Surface::kRocks});
  EXPECT_EQ(surface_at(w, -1.0, 0.0), Surface::kSand);
  EXPECT_EQ(surface_at(w, 10.0, 10.0), Surface::kGrass);
  EXPECT_EQ(surface_at(w, 1.5, 0.0), Surface::kRocks);  // later region wins
}

TEST(VegetationAt, NearestThenListOrder) {
  TerrainWorld w;
  w.vegetation.push_back({VegetationKind::kTallGrass, {0.0, 0.0}, 1.0, 1.0, true, 50.0});
  w.vegetation.push_back({VegetationKind::kBush, {0.5, 0.0}, 1.0, 1.0, true, 60.0});
  w.vegetation.push_back({VegetationKind::kTallGrass, {1.0, 0.0}, 1.0, 1.0, true, 50.0});
  EXPECT_EQ(vegetation_at(w, 0.45, 0.0)->kind, VegetationKind::kBush);
  EXPECT_EQ(vegetation_at(w, 0.25, 0.0), &w.vegetation[0]);  // tie goes to the first
  EXPECT_EQ(vegetation_at(w, 5.0, 0.0), nullptr);
}

TEST(SurfaceTable, Defaults) {
  const SurfaceTable t = default_surface_table();
  EXPECT_NO_THROW(validate_surface_table(t));
  const auto gain = [&](Surface s) { return t[static_cast<std::size_t>(s)].vibration_gain; };
  for (Surface smooth : {Surface::kAsphalt, Surface::kConcrete}) {
    for (Surface rough : {Surface::kSand, Surface::kRocks}) EXPECT_LT(gain(smooth), gain(rough));
  }
  for (const SurfaceClass& s : t) EXPECT_LT(s.slip_ratio, 1.0);
  SurfaceTable bad = t;
  bad[0].slip_ratio = 1.0;
  EXPECT_THROW(validate_surface_table(bad), std::invalid_argument);
}

TEST(Vegetation, KindRules) {
  EXPECT_THROW(validate(VegetationInstance{VegetationKind::kTree, {}, 0.3, 3.0, true, 90.0}),
               std::invalid_argument);
  EXPECT_THROW(validate(VegetationInstance{VegetationKind::kTallGrass, {}, 1, 1, false, 50.0}),
               std::invalid_argument);
  EXPECT_THROW(validate(VegetationInstance{VegetationKind::kTallGrass, {}, 1, 1, true, 75.0}),
               std::invalid_argument);
  EXPECT_THROW(validate(VegetationInstance{VegetationKind::kTree, {}, 0.3, 3.0, false, 60.0}),
               std::invalid_argument);
  EXPECT_NO_THROW(validate(VegetationInstance{VegetationKind::kTree, {}, 0.3, 3, false, 90}));
}

std::set<Surface> surfaces_present(const TerrainWorld& w) {
  std::set<Surface> out;
  for (double x = w.bounds.x_min; x <= w.bounds.x_max; x += 0.25) {
    for (double y = w.bounds.y_min; y <= w.bounds.y_max; y += 0.25) out.insert(surface_at(w, x, y));
  }
  return out;
}

// Segment point is a challenge if it is vegetated, on a deformable or loose
// surface, or on a slope steeper than 15%.
bool challenge_at(const TerrainWorld& w, Vec2 p) {
  if (vegetation_at(w, p.x, p.y)) return true;
  const Surface s = surface_at(w, p.x, p.y);
  if (s == Surface::kSand || s == Surface::kMud || s == Surface::kRocks || s == Surface::kMulch) {
    return true;
  }
  const LocalSlope a = terrain_slope(w, p, 0.0, 0.2);
  return std::hypot(a.along, a.across) > 0.15;
}

std::string inventory(const Scenario& s) {
  std::map<std::string, int> n;
  for (const auto& r : s.world.regions) ++n["region/" + std::string(to_string(r.surface))];
  for (const auto& v : s.world.vegetation) ++n["veg/" + std::string(to_string(v.kind))];
  n["obstacles"] = static_cast<int>(s.world.obstacles.size());
  n["bumps"] = static_cast<int>(s.world.terrain.bumps.size());
  n["steps"] = static_cast<int>(s.world.terrain.steps.size());
  std::string out;
  for (const auto& [k, v] : n) out += k + "=" + std::to_string(v) + ";";
  return out;
}

TEST(Scenarios, PavementAndGrass) {
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    const Scenario s = build_scenario("s1", seed);
    EXPECT_EQ(surfaces_present(s.world), (std::set<Surface>{Surface::kAsphalt, Surface::kGrass}));
    // No tree within a robot footprint of the direct line.
    const Vec2 a = s.start.position(), b = s.goal;
    for (const auto& v : s.world.vegetation) {
      if (v.kind != VegetationKind::kTree) continue;
      const Vec2 ab = b - a;
      const double t = std::clamp(dot(v.position - a, ab) / dot(ab, ab), 0.0, 1.0);
      EXPECT_GT(distance(a + t * ab, v.position), v.radius + 0.4);
    }
  }
}

TEST(Scenarios, RocksGrassTrees) {
  for (std::uint64_t seed : {0u, 3u}) {
    const Scenario s = build_scenario("s3", seed);
    int rocks = 0, grass = 0, trees = 0;
    for (const auto& r : s.world.regions) rocks += r.surface == Surface::kRocks;
    for (const auto& v : s.world.vegetation) {
      grass += v.kind == VegetationKind::kTallGrass && v.pliable;
      trees += v.kind == VegetationKind::kTree;
    }
    EXPECT_GE(rocks, 1);
    EXPECT_GE(grass, 1);
    EXPECT_GE(trees, 3);
  }
}

TEST(Scenarios, InventoryIndependentOfSeed) {
  const Scenario a = build_scenario("s2", 1);
  const Scenario b = build_scenario("s2", 2);
  EXPECT_EQ(inventory(a), inventory(b));
  EXPECT_NE(a.world.terrain.bumps[0].center, b.world.terrain.bumps[0].center);
}

TEST(Scenarios, PureFunctionOfIdAndSeed) {
  for (const auto& id : builtin_scenario_ids()) {
    const Scenario a = build_scenario(id, 5);
    const Scenario b = build_scenario(id, 5);
    EXPECT_EQ(inventory(a), inventory(b));
    EXPECT_EQ(a.goal, b.goal);
    EXPECT_EQ(a.start, b.start);
  }
  EXPECT_THROW(build_scenario("s9", 0), std::invalid_argument);
}

TEST(Scenarios, DirectLineCrossesAChallenge) {
  for (const auto& id : builtin_scenario_ids()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Scenario s = build_scenario(id, seed);
      const Vec2 a = s.start.position(), b = s.goal;
      EXPECT_GE(distance(a, b), id == "step" ? 10.0 : 15.0) << id;
      const int n = static_cast<int>(std::ceil(distance(a, b) / 0.1));
      bool hit = false;
      for (int i = 0; i <= n && !hit; ++i) {
        hit = challenge_at(s.world, a + (double(i) / n) * (b - a));
      }
      EXPECT_TRUE(hit) << id << " seed " << seed;
    }
  }
}

}  // namespace
}  // namespace outnav
