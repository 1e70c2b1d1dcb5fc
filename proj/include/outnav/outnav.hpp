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


#ifndef OUTNAV_OUTNAV_HPP
#define OUTNAV_OUTNAV_HPP

#include "outnav/episode_io.hpp"
#include "outnav/geometry.hpp"
#include "outnav/gridmap.hpp"
#include "outnav/perception.hpp"
#include "outnav/planner.hpp"
#include "outnav/rng.hpp"
#include "outnav/robot.hpp"
#include "outnav/runner.hpp"
#include "outnav/scenarios.hpp"
#include "outnav/sensors.hpp"
#include "outnav/serialization.hpp"
#include "outnav/sim.hpp"
#include "outnav/switching.hpp"
#include "outnav/world.hpp"

#endif  // OUTNAV_OUTNAV_HPP
