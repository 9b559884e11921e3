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

#ifndef SUP__PLANNING_METRICS_HPP_
#define SUP__PLANNING_METRICS_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sup/canonical_json.hpp"
#include "sup/scenario.hpp"
#include "sup/trajectory_planner.hpp"

namespace sup::metrics
{

using geometry::OrientedBox;
using planning::ObstacleTrack;

enum class DeMode
{
  at_horizon,
  cumulative_mean,
};

std::string to_string(DeMode mode);
/// Accepts "at-horizon" or "cumulative-mean"; throws std::invalid_argument.
DeMode parse_de_mode(std::string_view text);

inline const std::vector<double> & default_horizons()
{
  static const std::vector<double> h{1.0, 2.0, 3.0};
  return h;
}

struct DisplacementResult
{
  std::vector<double> per_horizon;
  double avg{0.0};
};

/// Index of the waypoint at time `horizon`. Throws std::invalid_argument when
/// the horizon is not a sampled timestep or lies beyond the trajectory.
std::size_t horizon_index(const Trajectory & traj, double horizon);

/// at_horizon: L2 at the waypoint whose time equals the horizon.
/// cumulative_mean: mean L2 over waypoints 1..k, excluding the t = 0 origin.
DisplacementResult displacement_error(
  const Trajectory & pred, const Trajectory & gt, std::span<const double> horizons,
  DeMode mode);

struct EgoDims
{
  double length{4.084};
  double width{1.85};
};

/// Ego footprints for steps 1..n-1, heading from the segment ending at each
/// step. A zero-length segment reuses the previous heading; `initial_heading`
/// seeds that chain.
std::vector<OrientedBox> ego_footprints(
  const Trajectory & pred, EgoDims dims, double initial_heading = 0.0);

/// First step index (>= 1) at which the ego overlaps any agent, or 0 if none.
std::size_t first_collision_step(
  const Trajectory & pred, std::span<const ObstacleTrack> agents, EgoDims dims,
  double initial_heading = 0.0);

/// Per horizon: true if an overlap occurs at any step whose time is <= horizon.
std::vector<bool> collisions(
  const Trajectory & pred, std::span<const ObstacleTrack> agents, EgoDims dims,
  std::span<const double> horizons, double initial_heading = 0.0);

struct MetricsSample
{
  std::string id;
  Trajectory pred;
  Trajectory gt;
  std::vector<ObstacleTrack> agents;
  double initial_heading{0.0};
};

struct MetricsReport
{
  DeMode mode{DeMode::at_horizon};
  std::vector<double> horizons;
  std::vector<double> de_per_horizon;
  double de_avg{0.0};
  std::vector<double> collision_per_horizon;
  double collision_avg{0.0};
  std::size_t scenarios{0};
};

/// Collision rate per horizon: colliding scenarios / total.
std::vector<double> collision_rate(
  std::span<const MetricsSample> samples, EgoDims dims, std::span<const double> horizons);

/// Corpus means, aggregated independently of sample order.
MetricsReport evaluate(
  std::span<const MetricsSample> samples, std::span<const double> horizons, DeMode mode,
  EgoDims dims = {}, unsigned jobs = 1);

io::Json report_to_json(const MetricsReport & report);
/// Fixed-width table with one column per horizon plus Avg; collision in percent.
std::string render_table(const MetricsReport & report);

/// Order-independent sum: sorts before accumulating so the result does not
/// depend on input order.
double stable_sum(std::vector<double> values);

}  // namespace sup::metrics

#endif  // SUP__PLANNING_METRICS_HPP_
