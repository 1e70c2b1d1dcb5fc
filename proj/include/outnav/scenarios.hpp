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
 * scenarios.hpp
 *
 * Built-in synthetic courses. Each is a function of (id, seed): the layout is
 * fixed and the seed jitters the goal, the start heading, vegetation
 * intensities and a few placements.
 *
 *   s1  pavement with a tall-grass patch across the direct line (wheeled)
 *   s2  sand field with a firm lane and boulder mounds (wheeled)
 *   s3  walled corridor closed by a grass band with trees, then rocks (legged)
 *   s4  mulch run-up to a steep ridge whose only pass is grass-filled (legged)
 *   s5  s4 followed by a long concrete stretch (legged)
 *   s6  lawn, then tall grass over mulch, then concrete (legged)
 *
 * plus "step", a flat course split by a sharp 0.2 m step.
 */

#ifndef OUTNAV_SCENARIOS_HPP
#define OUTNAV_SCENARIOS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "outnav/geometry.hpp"
#include "outnav/rng.hpp"
#include "outnav/robot.hpp"
#include "outnav/world.hpp"

namespace outnav {

struct Scenario {
  std::string id;
  std::string description;
  TerrainWorld world;
  Pose2 start;
  Vec2 goal;
  std::string robot = "husky";
};

inline const std::vector<std::string>& builtin_scenario_ids() {
  static const std::vector<std::string> ids = {"s1", "s2", "s3", "s4", "s5", "s6", "step"};
  return ids;
}

namespace detail {

inline VegetationInstance tall_grass(Vec2 p, double radius, double height, Rng& rng) {
  return {VegetationKind::kTallGrass, p, radius, height, true, rng.uniform(45.0, 65.0)};
}

inline VegetationInstance tree(Vec2 p, double radius, Rng& rng) {
  return {VegetationKind::kTree, p, radius, 4.0, false, rng.uniform(82.0, 98.0)};
}

// Rectangular block of overlapping grass disks; radius >= spacing / sqrt(2)
// leaves no gaps.
inline void grass_block(TerrainWorld& w, double x0, double x1, double y0, double y1,
                        double spacing, double radius, double height, Rng& rng) {
  for (double x = x0; x <= x1 + 1e-9; x += spacing) {
    for (double y = y0; y <= y1 + 1e-9; y += spacing) {
      w.vegetation.push_back(tall_grass({x, y}, radius, height, rng));
    }
  }
}

inline void rock_wall(TerrainWorld& w, double x0, double x1, double y, double spacing) {
  for (double x = x0; x <= x1 + 1e-9; x += spacing) {
    w.obstacles.push_back({{x, y}, 0.45, 1.2, 85.0});
  }
}

// Ridge of mounds along x = x_ridge spanning [y_lo, y_hi], skipping the pass.
inline void ridge(TerrainWorld& w, double x_ridge, double y_lo, double y_hi,
                  double pass_lo, double pass_hi, double amplitude, double sigma,
                  double spacing) {
  for (double y = y_lo; y <= y_hi + 1e-9; y += spacing) {
    if (y > pass_lo - sigma && y < pass_hi + sigma) continue;
    w.terrain.bumps.push_back({{x_ridge, y}, amplitude, sigma});
  }
}

inline Scenario scenario_s1(Rng& rng) {
  Scenario s;
  s.id = "s1";
  s.description = "pavement with a tall-grass patch across the direct line";
  s.robot = "husky";
  TerrainWorld& w = s.world;
  w.bounds = {-5.0, 35.0, -15.0, 15.0};
  w.default_surface = Surface::kGrass;
  w.regions.push_back({rectangle(-5.0, -2.5, 35.0, 2.5), Surface::kAsphalt});
  w.regions.push_back({rectangle(5.0, -7.0, 17.0, 7.0), Surface::kGrass});
  grass_block(w, 6.5, 15.5, -6.0, 6.0, 2.0, 1.5, 0.9, rng);
  w.vegetation.push_back(tree({11.0, 10.0}, 0.4, rng));
  w.vegetation.push_back(tree({11.0, -10.0}, 0.4, rng));
  w.vegetation.push_back(tree({3.0, 5.5}, 0.35, rng));
  s.start = {0.0, 0.0, rng.uniform(-0.15, 0.15)};
  s.goal = {22.0, rng.uniform(-1.0, 1.0)};
  return s;
}

inline Scenario scenario_s2(Rng& rng) {
  Scenario s;
  s.id = "s2";
  s.description = "sand field with a firm lane and boulder mounds";
  s.robot = "husky";
  TerrainWorld& w = s.world;
  w.bounds = {-5.0, 35.0, -15.0, 15.0};
  w.default_surface = Surface::kGrass;
  w.regions.push_back({rectangle(3.0, -8.0, 19.0, 8.0), Surface::kSand});
  // Firm lane: starts on the direct line and bears away from it.
  w.regions.push_back(
      {Polygon{{{3.0, -1.0}, {16.0, 1.6}, {16.0, 3.6}, {3.0, 1.0}}}, Surface::kConcrete});
  w.terrain.slope_y = -0.02;
  for (const Vec2 c : {Vec2{9.0, -6.5}, Vec2{13.0, -7.0}, Vec2{16.0, -3.0}}) {
    w.terrain.bumps.push_back(
        {{c.x + rng.uniform(-0.3, 0.3), c.y + rng.uniform(-0.3, 0.3)}, 0.6, 0.5});
  }
  s.start = {0.0, 0.0, rng.uniform(-0.1, 0.1)};
  s.goal = {22.0, rng.uniform(-0.5, 0.5)};
  return s;
}

inline Scenario scenario_s3(Rng& rng) {
  Scenario s;
  s.id = "s3";
  s.description = "walled corridor closed by a grass band with trees, then rocks";
  s.robot = "spot";
  TerrainWorld& w = s.world;
  w.bounds = {-5.0, 35.0, -15.0, 15.0};
  w.default_surface = Surface::kGrass;
  w.regions.push_back({rectangle(15.0, -8.0, 21.0, 8.0), Surface::kRocks});
  rock_wall(w, -2.0, 26.0, 8.0, 0.8);
  rock_wall(w, -2.0, 26.0, -8.0, 0.8);
  grass_block(w, 9.0, 14.0, -7.5, 7.5, 1.6, 1.2, 0.8, rng);
  w.vegetation.push_back(tree({11.5, 3.5 + rng.uniform(-0.5, 0.5)}, 0.35, rng));
  w.vegetation.push_back(tree({10.5, -3.0 + rng.uniform(-0.5, 0.5)}, 0.35, rng));
  w.vegetation.push_back(tree({13.0, -6.0}, 0.35, rng));
  w.vegetation.push_back(tree({12.5, 6.5}, 0.35, rng));
  s.start = {0.0, 0.0, rng.uniform(-0.15, 0.15)};
  s.goal = {23.0, rng.uniform(-1.0, 1.0)};
  return s;
}

inline void ridge_course(TerrainWorld& w, Rng& rng, double x_ridge, double pass_center) {
  w.bounds = {-5.0, 40.0, -15.0, 15.0};
  w.default_surface = Surface::kMulch;
  w.regions.push_back({rectangle(x_ridge + 1.5, -15.0, 40.0, 15.0), Surface::kConcrete});
  const double half = 2.2;
  ridge(w, x_ridge, -15.0, 15.0, pass_center - half, pass_center + half, 1.0, 0.6, 1.0);
  grass_block(w, x_ridge - 1.5, x_ridge + 1.5, pass_center - 2.0, pass_center + 2.0, 1.0,
              0.75, 0.7, rng);
}

inline Scenario scenario_s4(Rng& rng) {
  Scenario s;
  s.id = "s4";
  s.description = "mulch run-up to a steep ridge whose only pass is grass-filled";
  s.robot = "spot";
  const double pass = rng.uniform(-0.8, 0.8);
  ridge_course(s.world, rng, 20.0, pass);
  s.start = {0.0, 0.0, rng.uniform(-0.15, 0.15)};
  s.goal = {23.5, pass + rng.uniform(-0.5, 0.5)};
  return s;
}

inline Scenario scenario_s5(Rng& rng) {
  Scenario s;
  s.id = "s5";
  s.description = "ridge course followed by a long concrete stretch";
  s.robot = "spot";
  const double pass = rng.uniform(-0.8, 0.8);
  ridge_course(s.world, rng, 14.0, pass);
  s.start = {0.0, 0.0, rng.uniform(-0.15, 0.15)};
  s.goal = {32.0, rng.uniform(-1.0, 1.0)};
  return s;
}

inline Scenario scenario_s6(Rng& rng) {
  Scenario s;
  s.id = "s6";
  s.description = "lawn, then tall grass over mulch, then concrete";
  s.robot = "spot";
  TerrainWorld& w = s.world;
  w.bounds = {-5.0, 40.0, -15.0, 15.0};
  w.default_surface = Surface::kGrass;
  w.regions.push_back({rectangle(6.0, -15.0, 18.0, 15.0), Surface::kMulch});
  w.regions.push_back({rectangle(18.0, -15.0, 40.0, 15.0), Surface::kConcrete});
  grass_block(w, 7.0, 11.0, -6.0, 6.0, 1.6, 1.2, 0.8, rng);
  s.start = {0.0, 0.0, rng.uniform(-0.1, 0.1)};
  s.goal = {33.0, rng.uniform(-0.5, 0.5)};
  return s;
}

inline Scenario scenario_step(Rng&) {
  Scenario s;
  s.id = "step";
  s.description = "flat concrete split by a sharp 0.2 m step";
  s.robot = "spot";
  TerrainWorld& w = s.world;
  w.bounds = {-5.0, 20.0, -10.0, 10.0};
  w.default_surface = Surface::kConcrete;
  w.terrain.steps.push_back({{5.0, 0.0}, 0.0, 0.2, 0.0});
  s.start = {0.0, 0.0, 0.0};
  s.goal = {10.0, 0.0};
  return s;
}

}  // namespace detail

/// Throws std::invalid_argument for an unknown id.
inline Scenario build_scenario(std::string_view id, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kScenario));
  Scenario s;
  if (id == "s1") {
    s = detail::scenario_s1(rng);
  } else if (id == "s2") {
    s = detail::scenario_s2(rng);
  } else if (id == "s3") {
    s = detail::scenario_s3(rng);
  } else if (id == "s4") {
    s = detail::scenario_s4(rng);
  } else if (id == "s5") {
    s = detail::scenario_s5(rng);
  } else if (id == "s6") {
    s = detail::scenario_s6(rng);
  } else if (id == "step") {
    s = detail::scenario_step(rng);
  } else {
    throw std::invalid_argument("unknown scenario '" + std::string(id) + "'");
  }
  s.world.seed = seed;
  for (const auto& v : s.world.vegetation) validate(v);
  return s;
}

}  // namespace outnav

#endif  // OUTNAV_SCENARIOS_HPP
