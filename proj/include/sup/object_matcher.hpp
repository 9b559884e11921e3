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

#ifndef SUP__OBJECT_MATCHER_HPP_
#define SUP__OBJECT_MATCHER_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sup/scenario.hpp"

namespace sup::matching
{

/// Depth (meters) of the near plane used to clip boxes crossing the camera.
inline constexpr double kNearPlane = 0.01;

struct MatchConfig
{
  double tau{0.5};
  bool require_category_equality{true};

  /// Throws std::invalid_argument unless 0 <= tau <= 1.
  void validate() const;
};

struct MatchedPair
{
  std::size_t critical{0};
  std::size_t detection{0};
  double a_iou{0.0};
  /// Camera whose projection was used.
  std::size_t camera{0};
};

struct MatchOutcome
{
  std::vector<MatchedPair> matched;
  std::vector<std::size_t> unmatched_critical;
  std::vector<std::size_t> unmatched_detections;
};

/// The 8 corners of a detection in the ego frame.
std::array<Eigen::Vector3d, 8> box_corners(const Detection3D & det);

struct Projection
{
  /// Image points of corners in front of the near plane and of edge/near-plane
  /// intersections.
  std::vector<Eigen::Vector2d> points;
  /// Axis-aligned hull of `points` before clipping to the image.
  BBox2D hull;
};

/// Empty when every corner lies at or behind the near plane.
std::optional<Projection> project_points(const Detection3D & det, const CameraModel & cam);

/// Hull of the projected box clipped to the image; empty if nothing is visible.
std::optional<BBox2D> project_box(const Detection3D & det, const CameraModel & cam);

/// Area of b_c within b_2d divided by the area of b_2d. Throws
/// std::invalid_argument if b_2d has no area.
double a_iou(const BBox2D & b_c, const BBox2D & b_2d);

/// Each detection uses the camera whose projection scores the highest aIoU
/// against any critical object (lowest camera index on ties). Pairs need
/// aIoU > tau (and equal category when required); selection is greedy by
/// descending aIoU, ties broken by critical then detection index.
MatchOutcome match_objects(
  std::span<const CriticalObject> critical, std::span<const Detection3D> detections,
  std::span<const CameraModel> cameras, const MatchConfig & config = {});

}  // namespace sup::matching

#endif  // SUP__OBJECT_MATCHER_HPP_
