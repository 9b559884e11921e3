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

#include "sup/object_matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sup/taxonomy.hpp"

namespace sup::matching
{

void MatchConfig::validate() const
{
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in [0, 1]");
  }
}

std::array<Eigen::Vector3d, 8> box_corners(const Detection3D & det)
{
  const double c = std::cos(det.yaw);
  const double s = std::sin(det.yaw);
  const double hl = 0.5 * det.size[0];
  const double hw = 0.5 * det.size[1];
  const double hh = 0.5 * det.size[2];
  std::array<Eigen::Vector3d, 8> out;
  std::size_t k = 0;
  for (double dz : {-hh, hh}) {
    for (auto [dx, dy] : {std::pair{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}) {
      out[k++] = Eigen::Vector3d(
        det.center[0] + c * dx - s * dy, det.center[1] + s * dx + c * dy, det.center[2] + dz);
    }
  }
  return out;
}

std::optional<Projection> project_points(const Detection3D & det, const CameraModel & cam)
{
  const auto corners = box_corners(det);
  std::array<Eigen::Vector3d, 8> cc;
  for (std::size_t i = 0; i < 8; ++i) {
    cc[i] = cam.rotation * corners[i] + cam.translation;
  }

  std::vector<Eigen::Vector3d> visible;
  for (const auto & p : cc) {
    if (p.z() > kNearPlane) {
      visible.push_back(p);
    }
  }
  if (visible.empty()) {
    return std::nullopt;
  }
  // Bottom face 0-3, top face 4-7, verticals i <-> i+4.
  static constexpr std::array<std::pair<int, int>, 12> edges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
  for (auto [a, b] : edges) {
    const auto & p = cc[a];
    const auto & q = cc[b];
    if ((p.z() > kNearPlane) != (q.z() > kNearPlane)) {
      const double t = (kNearPlane - p.z()) / (q.z() - p.z());
      Eigen::Vector3d x = p + t * (q - p);
      x.z() = kNearPlane;
      visible.push_back(x);
    }
  }

  Projection proj;
  double u_min = std::numeric_limits<double>::infinity();
  double v_min = u_min;
  double u_max = -u_min;
  double v_max = -u_min;
  for (const auto & p : visible) {
    const Eigen::Vector2d uv(cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy);
    proj.points.push_back(uv);
    u_min = std::min(u_min, uv.x());
    u_max = std::max(u_max, uv.x());
    v_min = std::min(v_min, uv.y());
    v_max = std::max(v_max, uv.y());
  }
  proj.hull = BBox2D{u_min, v_min, u_max, v_max};
  return proj;
}

std::optional<BBox2D> project_box(const Detection3D & det, const CameraModel & cam)
{
  auto proj = project_points(det, cam);
  if (!proj) {
    return std::nullopt;
  }
  BBox2D b{
    std::max(proj->hull.x1, 0.0), std::max(proj->hull.y1, 0.0),
    std::min(proj->hull.x2, static_cast<double>(cam.width)),
    std::min(proj->hull.y2, static_cast<double>(cam.height))};
  if (!(b.x1 < b.x2 && b.y1 < b.y2)) {
    return std::nullopt;
  }
  return b;
}

double a_iou(const BBox2D & b_c, const BBox2D & b_2d)
{
  const double area = b_2d.area();
  if (!(b_2d.width() > 0.0 && b_2d.height() > 0.0 && std::isfinite(area))) {
    throw std::invalid_argument("aIoU: projected box has zero area");
  }
  const double w = std::min(b_c.x2, b_2d.x2) - std::max(b_c.x1, b_2d.x1);
  const double h = std::min(b_c.y2, b_2d.y2) - std::max(b_c.y1, b_2d.y1);
  if (w <= 0.0 || h <= 0.0) {
    return 0.0;
  }
  return std::clamp(w * h / area, 0.0, 1.0);
}

MatchOutcome match_objects(
  std::span<const CriticalObject> critical, std::span<const Detection3D> detections,
  std::span<const CameraModel> cameras, const MatchConfig & config)
{
  config.validate();

  struct Candidate
  {
    std::size_t critical;
    std::size_t detection;
    double value;
    std::size_t camera;
  };
  std::vector<Candidate> candidates;

  for (std::size_t d = 0; d < detections.size(); ++d) {
    // Pick this detection's best camera.
    std::optional<std::size_t> best_cam;
    double best_score = -1.0;
    std::vector<double> best_row;
    for (std::size_t k = 0; k < cameras.size(); ++k) {
      auto box = project_box(detections[d], cameras[k]);
      if (!box) {
        continue;
      }
      std::vector<double> row(critical.size(), 0.0);
      double top = 0.0;
      for (std::size_t c = 0; c < critical.size(); ++c) {
        row[c] = a_iou(critical[c].box, *box);
        top = std::max(top, row[c]);
      }
      if (top > best_score) {
        best_score = top;
        best_cam = k;
        best_row = std::move(row);
      }
    }
    if (!best_cam) {
      continue;
    }
    for (std::size_t c = 0; c < critical.size(); ++c) {
      if (config.require_category_equality &&
        fold_label(critical[c].category) != fold_label(detections[d].category))
      {
        continue;
      }
      if (best_row[c] > config.tau) {
        candidates.push_back({c, d, best_row[c], *best_cam});
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate & a, const Candidate & b) {
      if (a.value != b.value) {
        return a.value > b.value;
      }
      return a.critical != b.critical ? a.critical < b.critical : a.detection < b.detection;
    });

  MatchOutcome out;
  std::vector<bool> c_used(critical.size(), false);
  std::vector<bool> d_used(detections.size(), false);
  for (const auto & cand : candidates) {
    if (c_used[cand.critical] || d_used[cand.detection]) {
      continue;
    }
    c_used[cand.critical] = true;
    d_used[cand.detection] = true;
    out.matched.push_back({cand.critical, cand.detection, cand.value, cand.camera});
  }
  for (std::size_t c = 0; c < critical.size(); ++c) {
    if (!c_used[c]) {
      out.unmatched_critical.push_back(c);
    }
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (!d_used[d]) {
      out.unmatched_detections.push_back(d);
    }
  }
  return out;
}

}  // namespace sup::matching
