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

// Tests for sim.hpp: truth dynamics, episodes and metrics.

#include <cmath>

#include <gtest/gtest.h>
#include "outnav/scenarios.hpp"
#include "outnav/sim.hpp"

namespace outnav {
namespace {

TerrainWorld flat_world(Surface s) {
  TerrainWorld w;
  w.default_surface = s;
  return w;
}

EpisodeLog run(const TerrainWorld& world, Pose2 start, Vec2 goal, const RobotSpec& robot,
               EpisodeConfig cfg, std::uint64_t seed = 1) {
  EpisodeSetup setup;
  setup.world = &world;
  setup.scenario = "fixture";
  setup.start = start;
  setup.goal = goal;
  setup.robot = robot;
  setup.seed = seed;
  return run_episode(setup, cfg);
}

EpisodeLog run_scenario(const std::string& id, Method m, std::uint64_t seed,
                        std::optional<RobotSpec> robot = std::nullopt) {
  const Scenario s = build_scenario(id, seed);
  EpisodeConfig cfg;
  cfg.method = m;
  return run(s.world, s.start, s.goal, robot ? *robot : *robot_by_name(s.robot), cfg, seed);
}

TEST(Step, FlatAsphaltAdvance) {
  const TerrainWorld w = flat_world(Surface::kAsphalt);
  RobotState s;
  const RobotState n = step(w, wheeled_robot(), s, {1.0, 0.0}, 0.1);
  EXPECT_NEAR(n.x, 0.098, 1e-12);
  EXPECT_EQ(n.y, 0.0);
  EXPECT_EQ(n.roll, 0.0);
  EXPECT_EQ(n.pitch, 0.0);
}

TEST(Step, GranularSlipHalvedForLegs) {
  const TerrainWorld w = flat_world(Surface::kSand);
  RobotState s;
  EXPECT_NEAR(step(w, wheeled_robot(), s, {1.0, 0.0}, 0.1).x, 0.1 * (1 - 0.35), 1e-12);
  s.kind = RobotKind::kLegged;
  EXPECT_NEAR(step(w, legged_robot(), s, {1.0, 0.0}, 0.1).x, 0.1 * (1 - 0.175), 1e-12);
}

TEST(Step, HaltsAtUnclimbableEdge) {
  TerrainWorld w = flat_world(Surface::kConcrete);
  w.terrain.steps.push_back({{1.0, 0.0}, 0.0, 0.2, 0.0});
  RobotState s;
  s.x = 0.5;  // footprint front at 0.9, the step is within the next cell
  const RobotSpec wheeled = wheeled_robot();
  ASSERT_GT(climb_gradient(w, wheeled, s.position(), 0.0), wheeled.max_climb_gradient);
  const RobotState n = step(w, wheeled, s, {1.0, 0.0}, 0.1);
  EXPECT_EQ(n.x, s.x);
  EXPECT_EQ(n.y, s.y);
  EXPECT_EQ(n.v_actual, 0.0);
  // Turning in place is still allowed.
  EXPECT_NEAR(step(w, wheeled, s, {0.0, 0.5}, 0.1).yaw, 0.05, 1e-12);
}

TEST(Step, Deterministic) {
  const Scenario sc = build_scenario("s2", 4);
  RobotState s;
  s.x = 3.0;
  s.y = 0.4;
  s.yaw = 0.3;
  const RobotState a = step(sc.world, wheeled_robot(), s, {0.7, 0.2}, 0.1);
  const RobotState b = step(sc.world, wheeled_robot(), s, {0.7, 0.2}, 0.1);
  EXPECT_EQ(a, b);
}

TEST(Step, AttitudeFollowsSlope) {
  TerrainWorld w = flat_world(Surface::kConcrete);
  w.terrain.slope_x = 0.2;
  RobotState s;
  const RobotState n = step(w, wheeled_robot(), s, {0.0, 0.0}, 0.1);
  EXPECT_NEAR(n.pitch, std::atan(0.2), 1e-9);
  EXPECT_NEAR(n.roll, 0.0, 1e-9);
}

TEST(Episode, EmptyWorldDrivesStraightAtSpeed) {
  const TerrainWorld w = flat_world(Surface::kAsphalt);
  EpisodeConfig cfg;
  const RobotSpec r = wheeled_robot();
  const EpisodeLog log = run(w, {0, 0, 0}, {10, 0}, r, cfg);
  EXPECT_EQ(log.outcome, Outcome::kSuccess);
  const EpisodeMetrics m = compute_metrics(w, log);
  EXPECT_NEAR(m.mean_velocity, r.v_max, 0.1 * r.v_max);
  EXPECT_LT(m.final_distance, 1.0);
}

TEST(Episode, BlindDriveIntoTreeCollides) {
  TerrainWorld w = flat_world(Surface::kGrass);
  w.vegetation.push_back({VegetationKind::kTree, {5.0, 0.0}, 0.4, 4.0, false, 90.0});
  EpisodeConfig cfg;
  cfg.planning_enabled = false;
  const EpisodeLog log = run(w, {0, 0, 0}, {10, 0}, wheeled_robot(), cfg);
  EXPECT_EQ(log.outcome, Outcome::kCollision);
}

TEST(Episode, PliableGrassNeverCollides) {
  TerrainWorld w = flat_world(Surface::kGrass);
  w.vegetation.push_back({VegetationKind::kTallGrass, {5.0, 0.0}, 1.0, 0.8, true, 50.0});
  EpisodeConfig cfg;
  cfg.planning_enabled = false;
  const EpisodeLog log = run(w, {0, 0, 0}, {10, 0}, wheeled_robot(), cfg);
  EXPECT_EQ(log.outcome, Outcome::kSuccess);
}

TEST(Episode, Deterministic) {
  const EpisodeLog a = run_scenario("s3", Method::kAdventr, 3);
  const EpisodeLog b = run_scenario("s3", Method::kAdventr, 3);
  ASSERT_EQ(a.ticks.size(), b.ticks.size());
  EXPECT_EQ(a.outcome, b.outcome);
  for (std::size_t i = 0; i < a.ticks.size(); ++i) {
    EXPECT_EQ(a.ticks[i].state, b.ticks[i].state);
    EXPECT_EQ(a.ticks[i].command, b.ticks[i].command);
    EXPECT_EQ(a.ticks[i].vibration, b.ticks[i].vibration);
    EXPECT_EQ(a.ticks[i].odom.x, b.ticks[i].odom.x);
  }
}

TEST(Episode, RefusesUnavailableModule) {
  const TerrainWorld w = flat_world(Surface::kAsphalt);
  EpisodeConfig cfg;
  cfg.method = Method::kProNavOnly;
  EXPECT_THROW(run(w, {0, 0, 0}, {10, 0}, wheeled_robot(), cfg), std::invalid_argument);
}

TEST(Episode, LegsClimbTheStepWheelsDoNot) {
  const EpisodeLog legs = run_scenario("step", Method::kAdventr, 0, legged_robot());
  const EpisodeLog wheels = run_scenario("step", Method::kAdventr, 0, wheeled_robot());
  EXPECT_EQ(legs.outcome, Outcome::kSuccess);
  EXPECT_NE(wheels.outcome, Outcome::kSuccess);
}

TEST(Episode, NaiveFailsTheRidge) {
  int failed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Outcome o = run_scenario("s4", Method::kNaive, seed).outcome;
    failed += o == Outcome::kTopple || o == Outcome::kTimeout;
  }
  EXPECT_GE(failed, 16);
}

TEST(Episode, SuccessMeansWithinRadius) {
  for (const char* id : {"s1", "s3", "s5", "s6"}) {
    const Scenario s = build_scenario(id, 2);
    const EpisodeLog log = run_scenario(id, Method::kAdventr, 2);
    const EpisodeMetrics m = compute_metrics(s.world, log);
    if (log.outcome == Outcome::kSuccess) EXPECT_LT(m.final_distance, 1.0) << id;
    EXPECT_NE(log.outcome, Outcome::kRunning);
    EXPECT_LE(m.elapsed, 120.0 + 1e-9);
  }
}

TEST(Metrics, StationaryEpisode) {
  const TerrainWorld w = flat_world(Surface::kAsphalt);
  EpisodeLog log;
  log.dt = 0.1;
  log.goal = {5, 0};
  for (int i = 0; i < 10; ++i) log.ticks.push_back(TickRecord{});
  const EpisodeMetrics m = compute_metrics(w, log);
  EXPECT_EQ(m.mean_velocity, 0.0);
  EXPECT_EQ(m.elevation_gradient, 0.0);
  EXPECT_EQ(m.path_length, 0.0);
  EXPECT_EQ(m.final_distance, 5.0);
}

TEST(Metrics, RampTelescopes) {
  TerrainWorld w = flat_world(Surface::kConcrete);
  w.terrain.slope_x = 0.1;
  EpisodeLog log;
  log.dt = 0.1;
  for (int i = 1; i <= 40; ++i) {
    TickRecord r;
    r.state.x = 0.25 * i;
    log.ticks.push_back(r);
  }
  const double rise = height_at(w, 10.0, 0.0) - height_at(w, 0.0, 0.0);
  EXPECT_NEAR(compute_metrics(w, log).elevation_gradient, rise * 100.0, 1e-9);
}

TEST(Metrics, RocksShakeMoreThanAsphalt) {
  EpisodeConfig cfg;
  cfg.planning_enabled = false;
  const TerrainWorld asphalt = flat_world(Surface::kAsphalt);
  const TerrainWorld rocks = flat_world(Surface::kRocks);
  // Same commanded profile and duration on both.
  cfg.timeout = 10.0;
  cfg.success_radius = 0.01;
  const RobotSpec r = wheeled_robot();
  const auto a = compute_metrics(asphalt, run(asphalt, {0, 0, 0}, {100, 0}, r, cfg));
  const auto b = compute_metrics(rocks, run(rocks, {0, 0, 0}, {100, 0}, r, cfg));
  EXPECT_GT(b.instability_cost, 5.0 * a.instability_cost);
}

TEST(Metrics, InstabilityAdditiveAndNonnegative) {
  const Scenario s = build_scenario("s2", 1);
  const EpisodeLog log = run_scenario("s2", Method::kAdventr, 1);
  ASSERT_GT(log.ticks.size(), 10u);
  const std::size_t cut = log.ticks.size() / 3;
  EpisodeLog head = log, tail = log;
  head.ticks.assign(log.ticks.begin(), log.ticks.begin() + cut);
  tail.ticks.assign(log.ticks.begin() + cut, log.ticks.end());
  const double whole = compute_metrics(s.world, log).instability_cost;
  const double parts = compute_metrics(s.world, head).instability_cost +
                       compute_metrics(s.world, tail).instability_cost;
  EXPECT_GE(whole, 0.0);
  EXPECT_NEAR(whole, parts, 1e-9 * std::max(1.0, whole));
  for (const TickRecord& r : log.ticks) EXPECT_GE(r.vibration, 0.0);
}

TEST(Outcomes, NamesRoundTrip) {
  for (Outcome o : {Outcome::kSuccess, Outcome::kCollision, Outcome::kTopple,
                    Outcome::kEntrapment, Outcome::kTimeout}) {
    EXPECT_EQ(outcome_from_string(to_string(o)), o);
  }
  for (Method m : kAllMethods) EXPECT_EQ(method_from_string(to_string(m)), m);
  EXPECT_FALSE(method_from_string("bogus").has_value());
}

}  // namespace
}  // namespace outnav
