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

#include "sup/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "sup/errors.hpp"

namespace sup
{

namespace
{

bool finite(Vec2 p) {return std::isfinite(p.x) && std::isfinite(p.y);}

void add(std::vector<Issue> & out, std::string kind, std::string field, std::string message)
{
  out.push_back({std::move(kind), std::move(field), std::move(message)});
}

void append(std::vector<Issue> & out, std::vector<Issue> more)
{
  out.insert(out.end(), std::make_move_iterator(more.begin()),
    std::make_move_iterator(more.end()));
}

void check_action(
  const MetaAction & a, const Taxonomy & taxonomy, const std::string & field,
  std::vector<Issue> & out)
{
  auto canon = taxonomy.canonical_token(a.token);
  if (!canon || *canon != a.token) {
    add(out, "vocabulary", field, "unknown meta-action token '" + a.token + "'");
    return;
  }
  if (taxonomy.is_conservative(a.token) != a.conservative) {
    add(out, "vocabulary", field,
      "conservative flag of '" + a.token + "' disagrees with the vocabulary");
  }
}

bool has_text(const std::optional<std::string> & s) {return s && !s->empty();}

}  // namespace

MetaAction make_action(std::string_view token, const Taxonomy & taxonomy)
{
  auto canon = taxonomy.canonical_token(token);
  if (!canon) {
    throw SchemaError("unknown meta-action token '" + std::string(token) + "'");
  }
  return MetaAction{*canon, taxonomy.is_conservative(*canon)};
}

MetaActionSequence make_sequence(std::span<const std::string> tokens, const Taxonomy & taxonomy)
{
  MetaActionSequence seq;
  seq.reserve(tokens.size());
  for (const auto & t : tokens) {
    seq.push_back(make_action(t, taxonomy));
  }
  return seq;
}

MetaActionSequence make_sequence(
  std::initializer_list<std::string_view> tokens, const Taxonomy & taxonomy)
{
  MetaActionSequence seq;
  seq.reserve(tokens.size());
  for (auto t : tokens) {
    seq.push_back(make_action(t, taxonomy));
  }
  return seq;
}

CameraModel CameraModel::facing(
  std::string name, double fx, double fy, double cx, double cy, int width, int height,
  const Eigen::Vector3d & mount, double yaw)
{
  // Ego axes (x fwd, y left, z up) to optical axes (x right, y down, z fwd).
  Eigen::Matrix3d ego_to_optical;
  ego_to_optical << 0.0, -1.0, 0.0,
    0.0, 0.0, -1.0,
    1.0, 0.0, 0.0;
  const Eigen::Matrix3d yaw_inv =
    Eigen::AngleAxisd(-yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  CameraModel cam;
  cam.name = std::move(name);
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = cx;
  cam.cy = cy;
  cam.width = width;
  cam.height = height;
  cam.rotation = ego_to_optical * yaw_inv;
  cam.translation = -cam.rotation * mount;
  return cam;
}

std::vector<Issue> check_box(const BBox2D & b, const std::string & field)
{
  std::vector<Issue> out;
  if (!(std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
    std::isfinite(b.y2)))
  {
    add(out, "schema", field, "box coordinates must be finite");
  } else if (b.x1 < 0.0 || b.y1 < 0.0 || b.x2 < 0.0 || b.y2 < 0.0) {
    add(out, "schema", field, "box coordinates must be >= 0");
  } else if (!(b.x1 < b.x2 && b.y1 < b.y2)) {
    add(out, "schema", field, "box requires x1 < x2 and y1 < y2");
  }
  return out;
}

std::vector<Issue> check_trajectory(const Trajectory & traj, const std::string & field)
{
  std::vector<Issue> out;
  if (!(std::isfinite(traj.dt) && traj.dt > 0.0)) {
    add(out, "schema", field + ".dt", "dt must be finite and > 0");
  }
  if (traj.waypoints.size() < 2) {
    add(out, "schema", field + ".waypoints", "at least 2 waypoints required");
  }
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    if (!finite(traj.waypoints[i])) {
      add(out, "schema", field + ".waypoints[" + std::to_string(i) + "]",
        "waypoint coordinates must be finite");
    }
  }
  return out;
}

std::vector<Issue> check_camera(const CameraModel & cam, const std::string & field)
{
  std::vector<Issue> out;
  if (!(cam.fx > 0.0 && cam.fy > 0.0 && std::isfinite(cam.fx) && std::isfinite(cam.fy))) {
    add(out, "schema", field, "fx and fy must be finite and > 0");
  }
  if (!(std::isfinite(cam.cx) && std::isfinite(cam.cy))) {
    add(out, "schema", field, "principal point must be finite");
  }
  if (cam.width <= 0 || cam.height <= 0) {
    add(out, "schema", field, "image dimensions must be > 0");
  }
  if (!cam.rotation.allFinite() || !cam.translation.allFinite()) {
    add(out, "schema", field, "extrinsics must be finite");
  } else {
    const double err =
      (cam.rotation * cam.rotation.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (err > 1e-9 || cam.rotation.determinant() < 0.0) {
      add(out, "schema", field + ".rotation", "rotation must be orthonormal within 1e-9");
    }
  }
  return out;
}

std::vector<Issue> check_record(const ScenarioRecord & r, const Taxonomy & taxonomy)
{
  std::vector<Issue> out;
  if (r.id.empty()) {
    add(out, "schema", "id", "id must be non-empty");
  }
  for (std::size_t i = 0; i < r.frames.size(); ++i) {
    const std::string f = "frames[" + std::to_string(i) + "]";
    if (r.frames[i].path.empty()) {
      add(out, "schema", f + ".path", "frame path must be non-empty");
    }
    if (!std::isfinite(r.frames[i].timestamp)) {
      add(out, "schema", f + ".timestamp", "timestamp must be finite");
    }
  }

  const auto & env = r.environment;
  auto check_label = [&](const std::string & value, const char * name, auto canon) {
      auto c = (taxonomy.*canon)(value);
      if (!c || *c != value) {
        add(out, "schema", std::string("environment.") + name,
          "label '" + value + "' is not in the configured set");
      }
    };
  check_label(env.weather, "weather", &Taxonomy::canonical_weather);
  check_label(env.time, "time", &Taxonomy::canonical_time);
  check_label(env.road, "road", &Taxonomy::canonical_road);
  if (env.lane.empty()) {
    add(out, "schema", "environment.lane", "lane description must be present");
  }

  for (std::size_t i = 0; i < r.critical_objects.size(); ++i) {
    const std::string f = "critical_objects[" + std::to_string(i) + "]";
    if (r.critical_objects[i].category.empty()) {
      add(out, "schema", f + ".category", "category must be non-empty");
    }
    append(out, check_box(r.critical_objects[i].box, f + ".box"));
  }
  for (std::size_t i = 0; i < r.analyses.size(); ++i) {
    const auto & a = r.analyses[i];
    const std::string f = "analyses[" + std::to_string(i) + "]";
    if (a.object >= r.critical_objects.size()) {
      add(out, "reference", f + ".object",
        "analysis references missing critical object " + std::to_string(a.object));
    }
    if (!has_text(a.static_attributes) && !has_text(a.motion_state) &&
      !has_text(a.particular_behavior))
    {
      add(out, "schema", f, "at least one of static_attributes, motion_state, "
        "particular_behavior is required");
    }
    if (a.influence.empty()) {
      add(out, "schema", f + ".influence", "influence must be present");
    }
  }

  if (r.meta_actions.empty()) {
    add(out, "schema", "meta_actions", "meta-action sequence must be non-empty");
  }
  for (std::size_t i = 0; i < r.meta_actions.size(); ++i) {
    check_action(r.meta_actions[i], taxonomy, "meta_actions[" + std::to_string(i) + "]", out);
  }
  check_action(r.decision.action, taxonomy, "decision.action", out);

  append(out, check_trajectory(r.trajectory, "trajectory"));

  const auto & ego = r.ego;
  if (!finite(ego.position)) {
    add(out, "schema", "ego.position", "position must be finite");
  }
  if (!(std::isfinite(ego.speed) && ego.speed >= 0.0)) {
    add(out, "schema", "ego.speed", "speed must be finite and >= 0");
  }
  if (!(ego.heading > -std::numbers::pi && ego.heading <= std::numbers::pi)) {
    add(out, "schema", "ego.heading", "heading must lie in (-pi, pi]");
  }
  for (std::size_t i = 0; i < ego.history.size(); ++i) {
    const auto & h = ego.history[i];
    if (!(std::isfinite(h.t) && finite(h.position) && std::isfinite(h.heading) &&
      std::isfinite(h.speed) && h.speed >= 0.0))
    {
      add(out, "schema", "ego.history[" + std::to_string(i) + "]",
        "history sample must be finite with speed >= 0");
    }
  }

  if (r.detections) {
    for (std::size_t i = 0; i < r.detections->size(); ++i) {
      const auto & d = (*r.detections)[i];
      const std::string f = "detections[" + std::to_string(i) + "]";
      if (d.category.empty()) {
        add(out, "schema", f + ".category", "category must be non-empty");
      }
      bool ok = std::isfinite(d.yaw);
      for (int k = 0; k < 3; ++k) {
        ok = ok && std::isfinite(d.center[k]) && std::isfinite(d.size[k]);
      }
      if (!ok) {
        add(out, "schema", f, "detection values must be finite");
      } else if (!(d.size[0] > 0.0 && d.size[1] > 0.0 && d.size[2] > 0.0)) {
        add(out, "schema", f + ".size", "all size components must be > 0");
      }
      for (std::size_t k = 0; k < d.history.size(); ++k) {
        if (!(std::isfinite(d.history[k].t) && finite(d.history[k].position))) {
          add(out, "schema", f + ".history[" + std::to_string(k) + "]",
            "track point must be finite");
        }
      }
    }
  }
  return out;
}

void throw_if_any(const std::vector<Issue> & issues)
{
  if (!issues.empty()) {
    throw SchemaError(issues.front().field + ": " + issues.front().message);
  }
}

void validate(const ScenarioRecord & record, const Taxonomy & taxonomy)
{
  throw_if_any(check_record(record, taxonomy));
}

}  // namespace sup
