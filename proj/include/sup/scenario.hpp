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

#ifndef SUP__SCENARIO_HPP_
#define SUP__SCENARIO_HPP_

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sup/geometry.hpp"
#include "sup/taxonomy.hpp"

namespace sup
{

using geometry::Vec2;

struct EnvironmentDescription
{
  std::string weather;
  std::string time;
  std::string road;
  /// Free text: lane options and the ego lane position.
  std::string lane;

  friend bool operator==(const EnvironmentDescription &, const EnvironmentDescription &) = default;
};

/// Axis-aligned pixel box, (x1, y1) top-left and (x2, y2) bottom-right.
struct BBox2D
{
  double x1{0.0};
  double y1{0.0};
  double x2{0.0};
  double y2{0.0};

  double width() const {return x2 - x1;}
  double height() const {return y2 - y1;}
  double area() const {return width() * height();}

  friend bool operator==(const BBox2D &, const BBox2D &) = default;
};

struct CriticalObject
{
  std::string category;
  BBox2D box;
  std::optional<std::string> description;

  friend bool operator==(const CriticalObject &, const CriticalObject &) = default;
};

/// Object-level analysis; `object` indexes ScenarioRecord::critical_objects.
struct ObjectAnalysis
{
  std::size_t object{0};
  std::optional<std::string> static_attributes;
  std::optional<std::string> motion_state;
  std::optional<std::string> particular_behavior;
  std::string influence;

  friend bool operator==(const ObjectAnalysis &, const ObjectAnalysis &) = default;
};

struct MetaAction
{
  std::string token;
  bool conservative{false};

  friend bool operator==(const MetaAction &, const MetaAction &) = default;
};

using MetaActionSequence = std::vector<MetaAction>;

/// Resolves each token against the vocabulary (canonical spelling plus the
/// conservative flag). Throws SchemaError naming the first unknown token.
MetaAction make_action(std::string_view token, const Taxonomy & taxonomy = Taxonomy::defaults());
MetaActionSequence make_sequence(
  std::span<const std::string> tokens, const Taxonomy & taxonomy = Taxonomy::defaults());
MetaActionSequence make_sequence(
  std::initializer_list<std::string_view> tokens, const Taxonomy & taxonomy = Taxonomy::defaults());

/// Action / subject / duration triple.
struct DecisionDescription
{
  MetaAction action;
  std::string subject;
  std::string duration;

  friend bool operator==(const DecisionDescription &, const DecisionDescription &) = default;
};

/// Ego-frame waypoints (x forward, y left, meters). Waypoint i is at time
/// i * dt; waypoint 0 is the ego position at the keyframe.
struct Trajectory
{
  std::vector<Vec2> waypoints;
  double dt{0.5};

  double time_at(std::size_t i) const {return static_cast<double>(i) * dt;}
  double duration() const {return waypoints.empty() ? 0.0 : time_at(waypoints.size() - 1);}

  friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

struct EgoSample
{
  double t{0.0};
  Vec2 position;
  double heading{0.0};
  double speed{0.0};

  friend bool operator==(const EgoSample &, const EgoSample &) = default;
};

struct EgoState
{
  Vec2 position;
  double heading{0.0};
  double speed{0.0};
  /// Past samples, oldest first, t <= 0 relative to the keyframe.
  std::vector<EgoSample> history;

  friend bool operator==(const EgoState &, const EgoState &) = default;
};

struct TrackPoint
{
  double t{0.0};
  Vec2 position;

  friend bool operator==(const TrackPoint &, const TrackPoint &) = default;
};

/// 3D detection in the ego frame. size = (length, width, height); yaw about +z.
struct Detection3D
{
  std::string category;
  std::array<double, 3> center{};
  std::array<double, 3> size{};
  double yaw{0.0};
  /// Past centers, oldest first, t <= 0.
  std::vector<TrackPoint> history;

  friend bool operator==(const Detection3D &, const Detection3D &) = default;
};

/// Pinhole camera. A point p in the ego frame maps to the camera frame as
/// rotation * p + translation; the camera looks down +z with x right, y down.
struct CameraModel
{
  std::string name;
  double fx{0.0};
  double fy{0.0};
  double cx{0.0};
  double cy{0.0};
  Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};
  Eigen::Vector3d translation{Eigen::Vector3d::Zero()};
  int width{0};
  int height{0};

  /// Camera at `mount` (ego frame) looking along ego +x, rotated by `yaw`.
  static CameraModel facing(
    std::string name, double fx, double fy, double cx, double cy, int width, int height,
    const Eigen::Vector3d & mount = Eigen::Vector3d::Zero(), double yaw = 0.0);
};

struct FrameRef
{
  std::string camera;
  std::string path;
  double timestamp{0.0};

  friend bool operator==(const FrameRef &, const FrameRef &) = default;
};

struct ScenarioRecord
{
  std::string id;
  std::vector<FrameRef> frames;
  EnvironmentDescription environment;
  std::vector<CriticalObject> critical_objects;
  std::vector<ObjectAnalysis> analyses;
  std::string scene_summary;
  MetaActionSequence meta_actions;
  DecisionDescription decision;
  Trajectory trajectory;
  EgoState ego;
  std::optional<std::vector<Detection3D>> detections;

  friend bool operator==(const ScenarioRecord &, const ScenarioRecord &) = default;
};

/// One invariant violation. `field` is a JSON-path-like locator.
struct Issue
{
  std::string kind;  // schema | vocabulary | reference | consistency
  std::string field;
  std::string message;
};

std::vector<Issue> check_box(const BBox2D & box, const std::string & field);
std::vector<Issue> check_trajectory(const Trajectory & traj, const std::string & field);
std::vector<Issue> check_camera(const CameraModel & cam, const std::string & field);
std::vector<Issue> check_record(const ScenarioRecord & record, const Taxonomy & taxonomy);

/// Throws SchemaError describing the first issue, if any.
void throw_if_any(const std::vector<Issue> & issues);
void validate(const ScenarioRecord & record, const Taxonomy & taxonomy = Taxonomy::defaults());

}  // namespace sup

#endif  // SUP__SCENARIO_HPP_
