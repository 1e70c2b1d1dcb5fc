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

#ifndef OUTNAV_ROBOT_HPP
#define OUTNAV_ROBOT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "outnav/geometry.hpp"

namespace outnav {

enum class RobotKind { kWheeled, kLegged };

inline std::string_view to_string(RobotKind k) {
  return k == RobotKind::kWheeled ? "Wheeled" : "Legged";
}

enum class Gait { kTrot, kAmble, kStableSlow };

inline std::string_view to_string(Gait g) {
  switch (g) {
    case Gait::kTrot: return "Trot";
    case Gait::kAmble: return "Amble";
    case Gait::kStableSlow: return "StableSlow";
  }
  return "?";
}

inline std::optional<Gait> gait_from_string(std::string_view s) {
  for (Gait g : {Gait::kTrot, Gait::kAmble, Gait::kStableSlow}) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

struct GaitParams {
  double max_speed = 1.0;   // multiplier on v_max (and on acceleration)
  double roughness = 1.0;   // multiplier on body/joint vibration
  double step_hz = 2.0;     // stride frequency of the joint baseline
};

inline GaitParams gait_params(Gait g) {
  switch (g) {
    case Gait::kTrot: return {1.0, 1.0, 2.0};
    case Gait::kAmble: return {0.7, 0.6, 1.5};
    case Gait::kStableSlow: return {0.45, 0.35, 1.0};
  }
  return {};
}

/// Map units per metre of rise used when converting physical terrain steps
/// into the map-units-per-cell scale of climb limits (1 unit = 1 cm).
inline constexpr double kMapUnitsPerMetre = 100.0;

struct RobotSpec {
  std::string name = "husky";
  RobotKind kind = RobotKind::kWheeled;
  double v_max = 1.0;              // m/s
  double w_max = 1.0;              // rad/s
  double a_v = 0.5;                // m/s^2
  double a_w = 1.5;                // rad/s^2
  double footprint_radius = 0.4;   // m
  double topple_limit = 0.5;       // rad, on |roll| and |pitch|
  double max_climb_gradient = 12;  // map units per cell
  double sensor_height = 0.75;     // m
};

inline RobotSpec wheeled_robot() { return RobotSpec{}; }

inline RobotSpec legged_robot() {
  RobotSpec s;
  s.name = "spot";
  s.kind = RobotKind::kLegged;
  s.max_climb_gradient = 30;
  s.sensor_height = 0.7;
  return s;
}

inline std::optional<RobotSpec> robot_by_name(std::string_view name) {
  if (name == "husky" || name == "wheeled") return wheeled_robot();
  if (name == "spot" || name == "legged") return legged_robot();
  return std::nullopt;
}

inline void validate(const RobotSpec& s) {
  if (!(s.v_max > 0 && s.w_max > 0 && s.a_v > 0 && s.a_w > 0 &&
        s.footprint_radius > 0 && s.topple_limit > 0 && s.max_climb_gradient > 0 &&
        s.sensor_height > 0)) {
    throw std::invalid_argument("robot spec '" + s.name + "': limits must be positive");
  }
}

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double v = 0.0;          // commanded linear velocity
  double w = 0.0;          // commanded angular velocity
  double v_actual = 0.0;   // slip-reduced ground speed of the last step
  RobotKind kind = RobotKind::kWheeled;
  Gait gait = Gait::kTrot;

  Vec2 position() const { return {x, y}; }
  Pose2 pose() const { return {x, y, yaw}; }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

}  // namespace outnav

#endif  // OUTNAV_ROBOT_HPP
