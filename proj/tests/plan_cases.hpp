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

// Randomized (world, state, decision) planning cases shared by the planner
// tests and the acceptance binary.

#ifndef OUTNAV_TESTS_PLAN_CASES_HPP
#define OUTNAV_TESTS_PLAN_CASES_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>

#include "outnav/perception.hpp"
#include "outnav/planner.hpp"
#include "outnav/robot.hpp"
#include "outnav/switching.hpp"
#include "outnav/world.hpp"

namespace outnav::testing {

struct PlanCase {
  std::unique_ptr<TerrainWorld> world;
  RobotSpec robot;
  RobotState state;
  Vec2 goal;
  SwitchDecision decision;
  ElevationMap ground;
  ElevationMap all;
  double speed_scale = 1.0;
  std::uint64_t seed = 0;
  PerceptionParams params;
};

// Elevation map sampled straight from the heightfield, with holes.
inline ElevationMap sampled_elevation(const TerrainWorld& w, Vec2 center, double top_extra,
                                      std::mt19937_64& rng) {
  const GridGeometry geom;
  GridMap raw(geom.size_n, geom.resolution, center);
  std::bernoulli_distribution hole(0.05);
  for (int r = 0; r < raw.size(); ++r) {
    for (int c = 0; c < raw.size(); ++c) {
      if (hole(rng)) continue;
      const Vec2 p = raw.cell_center(r, c);
      double z = height_at(w, p.x, p.y);
      if (const VegetationInstance* v = vegetation_at(w, p.x, p.y)) z += top_extra * v->height;
      raw.set(r, c, z);
    }
  }
  const auto range = valid_range(raw);
  const double lo = range ? range->min : 0.0;
  const double hi = range ? std::max(range->max, lo + 1.0) : lo + 1.0;
  return {normalize(raw, lo, hi), lo, hi};
}

inline SwitchDecision random_decision(std::mt19937_64& rng, RobotKind kind) {
  const ModuleId surface = surface_module_for(kind);
  const ModuleId pool[3] = {ModuleId::kVern, ModuleId::kTerp, surface};
  SwitchDecision d;
  const unsigned mask = static_cast<unsigned>(rng() % 8);
  for (unsigned i = 0; i < 3; ++i) {
    if ((mask >> i) & 1u && d.active.size() < 2) {
      d.active.push_back(pool[i]);
      d.reason.push_back(Trigger::kFallback);
    }
  }
  return d;
}

inline PlanCase random_plan_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  PlanCase pc;
  pc.seed = seed;
  pc.world = std::make_unique<TerrainWorld>();
  TerrainWorld& w = *pc.world;
  w.bounds = {-20.0, 20.0, -20.0, 20.0};
  w.default_surface = kAllSurfaces[rng() % kAllSurfaces.size()];
  w.terrain.slope_x = in(-0.05, 0.05);
  w.terrain.slope_y = in(-0.05, 0.05);
  for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
    w.terrain.bumps.push_back({{in(-6, 6), in(-6, 6)}, in(-0.5, 1.0), in(0.4, 1.5)});
  }
  for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
    w.regions.push_back({Disk{{in(-6, 6), in(-6, 6)}, in(0.5, 3.0)},
                         kAllSurfaces[rng() % kAllSurfaces.size()]});
  }
  for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i) {
    w.obstacles.push_back({{in(-6, 6), in(-6, 6)}, in(0.2, 0.8), 1.0, 85.0});
  }
  for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i) {
    const auto kind = static_cast<VegetationKind>(rng() % 3);
    const bool pliable = kind != VegetationKind::kTree;
    w.vegetation.push_back({kind, {in(-6, 6), in(-6, 6)}, in(0.3, 1.5), in(0.4, 3.0), pliable,
                            pliable ? in(40, 70) : in(80, 100)});
  }

  pc.robot = (rng() % 2) ? legged_robot() : wheeled_robot();
  pc.state.kind = pc.robot.kind;
  pc.state.x = in(-1, 1);
  pc.state.y = in(-1, 1);
  pc.state.yaw = in(-3.14, 3.14);
  pc.state.v = in(0.0, pc.robot.v_max);
  pc.state.w = in(-pc.robot.w_max, pc.robot.w_max);
  // A few cases aim near the robot to exercise the close-goal heading term.
  const double reach = (rng() % 5 == 0) ? in(0.2, 1.2) : in(2.0, 12.0);
  const double bearing = in(-3.14, 3.14);
  pc.goal = {pc.state.x + reach * std::cos(bearing), pc.state.y + reach * std::sin(bearing)};
  pc.decision = random_decision(rng, pc.robot.kind);
  const double scales[] = {1.0, 1.0, 0.7, 0.4};
  pc.speed_scale = scales[rng() % 4];
  pc.params.vegetation.misclassification_rate = 0.1;

  const Vec2 c = lattice_center(pc.state.position(), 0.25);
  pc.ground = sampled_elevation(w, c, 0.0, rng);
  pc.all = sampled_elevation(w, c, 1.0, rng);
  return pc;
}

inline PerceptionOutputs perceive_case(const PlanCase& pc) {
  PerceptionInputs in;
  in.world = pc.world.get();
  in.pose = pc.state.pose();
  const Vec2 c = lattice_center(pc.state.position(), pc.params.grid.resolution);
  in.map_pose = {c.x, c.y, pc.state.yaw};
  in.ground_elevation = &pc.ground;
  in.all_elevation = &pc.all;
  in.q_surf = 0.5;
  in.tau_surf = 1.0;
  in.tick = 3;
  in.seed = pc.seed;
  return perceive(in, pc.decision, pc.robot, pc.params);
}

inline PlanCase clone_case(const PlanCase& pc) {
  PlanCase out;
  out.world = std::make_unique<TerrainWorld>(*pc.world);
  out.robot = pc.robot;
  out.state = pc.state;
  out.goal = pc.goal;
  out.decision = pc.decision;
  out.ground = pc.ground;
  out.all = pc.all;
  out.speed_scale = pc.speed_scale;
  out.seed = pc.seed;
  out.params = pc.params;
  return out;
}

inline ElevationMap random_elevation(Vec2 center, std::mt19937_64& rng) {
  const GridGeometry geom;
  GridMap g(geom.size_n, geom.resolution, center);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::bernoulli_distribution hole(0.1);
  for (int r = 0; r < g.size(); ++r) {
    for (int c = 0; c < g.size(); ++c) {
      if (!hole(rng)) g.set(r, c, u(rng));
    }
  }
  std::uniform_real_distribution<double> span(0.5, 3.0);
  return {g, -1.0, -1.0 + span(rng)};
}

// Changes only what feeds module `m`: the ground elevation map for the
// elevation module, the surface layout and noise for the surface modules,
// and the classifier inputs for the vegetation module.
inline void perturb_module_inputs(PlanCase& pc, ModuleId m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec2 c = lattice_center(pc.state.position(), pc.params.grid.resolution);
  TerrainWorld& w = *pc.world;
  switch (m) {
    case ModuleId::kTerp:
      pc.ground = random_elevation(c, rng);
      break;
    case ModuleId::kTerraPn:
    case ModuleId::kProNav:
      w.default_surface = kAllSurfaces[rng() % kAllSurfaces.size()];
      for (auto& r : w.regions) r.surface = kAllSurfaces[rng() % kAllSurfaces.size()];
      w.regions.push_back({Disk{{c.x + 6.0 * (u(rng) - 0.5), c.y + 6.0 * (u(rng) - 0.5)},
                                0.5 + 2.0 * u(rng)},
                           kAllSurfaces[rng() % kAllSurfaces.size()]});
      pc.params.surface_noise_std = 15.0 * u(rng);
      break;
    case ModuleId::kVern:
      pc.all = random_elevation(c, rng);
      pc.params.vegetation.misclassification_rate = 0.5 * u(rng);
      for (auto& v : w.vegetation) v.height = 0.3 + 2.5 * u(rng);
      break;
  }
}

inline const std::optional<CostMap>& module_map(const PerceptionOutputs& out, ModuleId m) {
  switch (m) {
    case ModuleId::kTerp:
      return out.elevation_cost;
    case ModuleId::kVern:
      return out.vegetation_cost;
    default:
      return out.surface_cost;
  }
}

inline PlanContext context_for(const PlanCase& pc, const PerceptionOutputs& out) {
  PlanContext ctx;
  ctx.goal = pc.goal;
  ctx.outputs = &out;
  ctx.v_max = pc.robot.v_max;
  ctx.inflation = pc.robot.footprint_radius + 0.5 * pc.params.grid.resolution;
  return ctx;
}

struct NeutralityStats {
  int checks = 0;          // perturbed plans of an inactive module
  int command_changes = 0;
  int stray_maps = 0;      // inactive module produced a map anyway
  int controls = 0;        // same perturbation with the module switched on
  int control_changes = 0;
};

// For each case and each module it leaves off, replans under `perturbations`
// random changes to that module's inputs. As a non-vacuity control, the same
// change is applied with the module on and its map compared.
inline NeutralityStats neutral_term_check(std::uint64_t first_seed, int cases,
                                          int perturbations) {
  NeutralityStats st;
  const PlannerConfig cfg;
  for (std::uint64_t seed = first_seed; seed < first_seed + cases; ++seed) {
    const PlanCase pc = random_plan_case(seed);
    const VelocityLimits lim = limits_of(pc.robot);
    const PerceptionOutputs base_out = perceive_case(pc);
    const VelocityCommand base =
        plan(pc.state, context_for(pc, base_out), lim, cfg, pc.speed_scale).command;
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    for (ModuleId m : {ModuleId::kTerp, surface_module_for(pc.robot.kind), ModuleId::kVern}) {
      if (pc.decision.has(m)) continue;
      SwitchDecision on;
      on.active = {m};
      on.reason = {Trigger::kFallback};
      PlanCase ref = clone_case(pc);
      ref.decision = on;
      const PerceptionOutputs ref_out = perceive_case(ref);
      bool control_changed = false;
      for (int k = 0; k < perturbations; ++k) {
        PlanCase q = clone_case(pc);
        perturb_module_inputs(q, m, rng);
        const PerceptionOutputs out = perceive_case(q);
        ++st.checks;
        st.stray_maps += module_map(out, m).has_value();
        const VelocityCommand cmd =
            plan(q.state, context_for(q, out), lim, cfg, q.speed_scale).command;
        st.command_changes += !(cmd == base);

        q.decision = on;
        const PerceptionOutputs on_out = perceive_case(q);
        const GridMap& a = module_map(on_out, m)->grid;
        const GridMap& b = module_map(ref_out, m)->grid;
        const auto av = a.values(), bv = b.values();
        if (!std::equal(av.begin(), av.end(), bv.begin(), bv.end())) control_changed = true;
      }
      // The vegetation map is identically zero in a world without vegetation.
      if (m == ModuleId::kVern && pc.world->vegetation.empty()) continue;
      ++st.controls;
      st.control_changes += control_changed;
    }
  }
  return st;
}

}  // namespace outnav::testing

#endif  // OUTNAV_TESTS_PLAN_CASES_HPP
