// Copyright 2026 The supkit Authors
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

#ifndef SUP_TESTS__FIXTURES_HPP_
#define SUP_TESTS__FIXTURES_HPP_

#include <string>

#include "sup/scenario.hpp"
#include "sup/scenario_io.hpp"

namespace sup::fixtures
{

inline std::string data_path(const std::string & name)
{
  return std::string(SUP_TEST_DATA) + "/" + name;
}

inline std::string synth_path(const std::string & name)
{
  return std::string(SUP_SYNTH_DATA) + "/" + name;
}

/// A fully populated record: two cameras, two critical objects with analyses,
/// a decision, ego history and detections.
inline ScenarioRecord annotated_sample()
{
  ScenarioRecord r;
  r.id = "sample-0001";
  r.frames = {{"front", "clips/0001/front_000120.jpg", 12.0},
    {"front_left", "clips/0001/front_left_000120.jpg", 12.0}};
  r.environment = {"rainy", "night", "urban", "two lanes with the ego vehicle in the right lane"};
  CriticalObject truck{"truck", {612.5, 301.25, 988.0, 640.0}, std::string("a white box truck")};
  CriticalObject worker{"construction worker", {1020.0, 380.0, 1090.5, 560.0}, std::nullopt};
  r.critical_objects = {truck, worker};
  ObjectAnalysis a0;
  a0.object = 0;
  a0.static_attributes = "large vehicle with its hazard lights on";
  a0.motion_state = "stationary in the right lane";
  a0.influence = "blocks the ego lane";
  ObjectAnalysis a1;
  a1.object = 1;
  a1.particular_behavior = "waving a flag toward oncoming traffic";
  a1.influence = "asks vehicles to pass slowly";
  r.analyses = {a0, a1};
  r.scene_summary =
    "A truck is parked in your lane with hazard lights on. A worker is directing traffic.";
  r.meta_actions = make_sequence({"Slow down", "Change lane to the left", "Go straight slowly"});
  r.decision = {make_action("Change lane to the left"), "the parked truck", "within 2 seconds"};
  r.trajectory.dt = 0.5;
  r.trajectory.waypoints = {{0.0, 0.0}, {3.9, 0.05}, {7.6, 0.4}, {11.1, 1.2}, {14.4, 2.3},
    {17.5, 3.1}, {20.4, 3.4}};
  r.ego.position = {0.0, 0.0};
  r.ego.heading = 0.0;
  r.ego.speed = 8.1;
  r.ego.history = {{-1.0, {-8.4, 0.0}, 0.0, 8.6}, {-0.5, {-4.15, 0.0}, 0.0, 8.35}};
  Detection3D d0;
  d0.category = "truck";
  d0.center = {18.0, 0.2, 1.6};
  d0.size = {7.5, 2.5, 3.2};
  d0.yaw = 0.02;
  d0.history = {{-0.5, {18.0, 0.2}}};
  Detection3D d1;
  d1.category = "construction worker";
  d1.center = {15.0, -2.8, 0.9};
  d1.size = {0.6, 0.6, 1.8};
  d1.yaw = -1.5;
  r.detections = std::vector<Detection3D>{d0, d1};
  return r;
}

}  // namespace sup::fixtures

#endif  // SUP_TESTS__FIXTURES_HPP_
