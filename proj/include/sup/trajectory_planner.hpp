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

#ifndef SUP__TRAJECTORY_PLANNER_HPP_
#define SUP__TRAJECTORY_PLANNER_HPP_

#include <optional>
#include <span>
#include <vector>

#include "sup/geometry.hpp"
#include "sup/scenario.hpp"

namespace sup::planning
{

using geometry::OrientedBox;

/// Footprint of one obstacle per trajectory step: boxes[i] is its pose at
/// time i * dt.
struct ObstacleTrack
{
  std::vector<OrientedBox> boxes;
};

/// Auxiliary scalars carried alongside the reference; the objective below
/// does not read them.
struct PlannerFeatures
{
  std::optional<double> speed_limit;
  std::optional<double> lateral_bound;
};

struct PlannerInputs
{
  Trajectory w_slow;
  EgoState ego;
  std::vector<ObstacleTrack> obstacles;
  PlannerFeatures features;

  /// Throws std::invalid_argument on bad geometry, short obstacle tracks, or a
  /// reference that does not start at the ego position (1e-6 m).
  void validate() const;
};

struct PlannerConfig
{
  double w_ref{1.0};
  double w_smooth{1.0};
  double w_obs{10.0};
  /// Clearance d0 below which obstacles are penalized, meters.
  double clearance{2.0};
  int max_iters{200};
  double initial_step{0.5};
  double armijo_c{1e-4};
  double shrink{0.5};
  double min_step{1e-12};
  /// Stop once the gradient norm (free waypoints) falls below this.
  double tolerance{1e-6};

  void validate() const;
};

/// w_ref * sum |w_i - slow_i|^2 + w_smooth * sum |w_{i+1} - 2 w_i + w_{i-1}|^2
///   + w_obs * sum_i sum_obstacles max(0, d0 - sd(w_i, box_i))^2
/// where sd is the signed distance to the obstacle's footprint at step i.
/// Throws std::invalid_argument if W and the reference differ in length or dt.
double objective(
  const Trajectory & w, const PlannerInputs & inputs, const PlannerConfig & config);

/// Analytic gradient of objective() with respect to every waypoint.
std::vector<Vec2> gradient(
  const Trajectory & w, const PlannerInputs & inputs, const PlannerConfig & config);

struct RefineResult
{
  Trajectory trajectory;
  int iterations{0};
  bool converged{false};
  /// Objective of the starting point followed by every accepted iterate.
  std::vector<double> objective_history;
};

/// Gradient descent with Armijo backtracking started from the reference, with
/// waypoint 0 held at the ego position. Throws std::domain_error if the
/// objective is not finite.
RefineResult refine_detailed(const PlannerInputs & inputs, const PlannerConfig & config = {});

Trajectory refine(const PlannerInputs & inputs, const PlannerConfig & config = {});

/// Per-step footprints from 3D detections: boxes keep their size and yaw and
/// move at the constant velocity implied by the last two history points.
std::vector<ObstacleTrack> predict_obstacles(
  std::span<const Detection3D> detections, double dt, std::size_t steps);

/// Smallest signed distance from any waypoint to its step's obstacle box.
double min_clearance(const Trajectory & w, std::span<const ObstacleTrack> obstacles);

}  // namespace sup::planning

#endif  // SUP__TRAJECTORY_PLANNER_HPP_
