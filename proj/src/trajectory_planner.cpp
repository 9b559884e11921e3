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

#include "sup/trajectory_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sup::planning
{

namespace
{

bool finite(Vec2 p) {return std::isfinite(p.x) && std::isfinite(p.y);}

void check_same_shape(const Trajectory & w, const PlannerInputs & in)
{
  if (w.waypoints.size() != in.w_slow.waypoints.size() || w.dt != in.w_slow.dt) {
    throw std::invalid_argument("trajectory and reference differ in length or dt");
  }
}

double norm_sq(std::span<const Vec2> g)
{
  double s = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    s += geometry::squared_norm(g[i]);
  }
  return s;
}

}  // namespace

void PlannerInputs::validate() const
{
  auto traj_issues = check_trajectory(w_slow, "w_slow");
  if (!traj_issues.empty()) {
    throw std::invalid_argument(traj_issues.front().field + ": " + traj_issues.front().message);
  }
  if (!finite(ego.position) || !std::isfinite(ego.heading) || !std::isfinite(ego.speed)) {
    throw std::invalid_argument("ego state must be finite");
  }
  if (geometry::norm(w_slow.waypoints.front() - ego.position) > 1e-6) {
    throw std::invalid_argument("reference trajectory must start at the ego position");
  }
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const auto & t = obstacles[k];
    if (t.boxes.size() < w_slow.waypoints.size()) {
      throw std::invalid_argument(
        "obstacle " + std::to_string(k) + " does not cover every trajectory step");
    }
    for (const auto & b : t.boxes) {
      if (!finite(b.center) || !std::isfinite(b.yaw) || !(b.length > 0.0 && b.width > 0.0)) {
        throw std::invalid_argument("obstacle " + std::to_string(k) + " has invalid geometry");
      }
    }
  }
}

void PlannerConfig::validate() const
{
  if (!(w_ref >= 0.0 && w_smooth >= 0.0 && w_obs >= 0.0 && clearance >= 0.0)) {
    throw std::invalid_argument("planner weights and clearance must be >= 0");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("max_iters must be >= 1");
  }
  if (!(tolerance > 0.0 && initial_step > 0.0 && shrink > 0.0 && shrink < 1.0 &&
    armijo_c > 0.0 && armijo_c < 1.0 && min_step > 0.0))
  {
    throw std::invalid_argument("invalid line-search parameters");
  }
}

double objective(const Trajectory & w, const PlannerInputs & in, const PlannerConfig & cfg)
{
  check_same_shape(w, in);
  const auto & p = w.waypoints;
  const auto & ref = in.w_slow.waypoints;
  const std::size_t n = p.size();

  double tracking = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tracking += geometry::squared_norm(p[i] - ref[i]);
  }
  double smooth = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    smooth += geometry::squared_norm(p[i + 1] - 2.0 * p[i] + p[i - 1]);
  }
  double obstacle = 0.0;
  if (cfg.w_obs > 0.0) {
    for (const auto & track : in.obstacles) {
      for (std::size_t i = 0; i < n; ++i) {
        const double gap = cfg.clearance - geometry::signed_distance(track.boxes[i], p[i]).value;
        if (gap > 0.0) {
          obstacle += gap * gap;
        }
      }
    }
  }
  return cfg.w_ref * tracking + cfg.w_smooth * smooth + cfg.w_obs * obstacle;
}

std::vector<Vec2> gradient(const Trajectory & w, const PlannerInputs & in, const PlannerConfig & cfg)
{
  check_same_shape(w, in);
  const auto & p = w.waypoints;
  const auto & ref = in.w_slow.waypoints;
  const std::size_t n = p.size();
  std::vector<Vec2> g(n);

  for (std::size_t i = 0; i < n; ++i) {
    g[i] = 2.0 * cfg.w_ref * (p[i] - ref[i]);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 d = 2.0 * cfg.w_smooth * (p[i + 1] - 2.0 * p[i] + p[i - 1]);
    g[i - 1] = g[i - 1] + d;
    g[i] = g[i] - 2.0 * d;
    g[i + 1] = g[i + 1] + d;
  }
  if (cfg.w_obs > 0.0) {
    for (const auto & track : in.obstacles) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto sd = geometry::signed_distance(track.boxes[i], p[i]);
        const double gap = cfg.clearance - sd.value;
        // At gap == 0 the hinge takes its zero branch.
        if (gap > 0.0) {
          g[i] = g[i] - (2.0 * cfg.w_obs * gap) * sd.gradient;
        }
      }
    }
  }
  return g;
}

RefineResult refine_detailed(const PlannerInputs & in, const PlannerConfig & cfg)
{
  in.validate();
  cfg.validate();

  RefineResult res;
  res.trajectory = in.w_slow;
  auto & x = res.trajectory.waypoints;
  x.front() = in.ego.position;

  double f = objective(res.trajectory, in, cfg);
  if (!std::isfinite(f)) {
    throw std::domain_error("planner objective is not finite");
  }
  res.objective_history.push_back(f);

  double step = cfg.initial_step;
  Trajectory trial = res.trajectory;
  for (int it = 0; it < cfg.max_iters; ++it) {
    auto g = gradient(res.trajectory, in, cfg);
    g.front() = Vec2{};
    const double gg = norm_sq(g);
    if (std::sqrt(gg) < cfg.tolerance) {
      res.converged = true;
      break;
    }
    step = std::min(cfg.initial_step, 2.0 * step);
    bool accepted = false;
    while (step >= cfg.min_step) {
      for (std::size_t i = 1; i < x.size(); ++i) {
        trial.waypoints[i] = x[i] - step * g[i];
      }
      trial.waypoints.front() = x.front();
      const double ft = objective(trial, in, cfg);
      if (std::isfinite(ft) && ft <= f - cfg.armijo_c * step * gg) {
        std::swap(res.trajectory.waypoints, trial.waypoints);
        trial.waypoints = res.trajectory.waypoints;
        f = ft;
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted) {
      break;
    }
    ++res.iterations;
    res.objective_history.push_back(f);
  }
  return res;
}

Trajectory refine(const PlannerInputs & inputs, const PlannerConfig & config)
{
  return refine_detailed(inputs, config).trajectory;
}

std::vector<ObstacleTrack> predict_obstacles(
  std::span<const Detection3D> detections, double dt, std::size_t steps)
{
  std::vector<ObstacleTrack> out;
  out.reserve(detections.size());
  for (const auto & d : detections) {
    Vec2 velocity;
    const auto & h = d.history;
    if (h.size() >= 2) {
      const auto & a = h[h.size() - 2];
      const auto & b = h[h.size() - 1];
      if (b.t > a.t) {
        velocity = (1.0 / (b.t - a.t)) * (b.position - a.position);
      }
    }
    ObstacleTrack track;
    track.boxes.reserve(steps);
    const Vec2 c0{d.center[0], d.center[1]};
    for (std::size_t i = 0; i < steps; ++i) {
      track.boxes.push_back({c0 + (static_cast<double>(i) * dt) * velocity, d.size[0], d.size[1],
          d.yaw});
    }
    out.push_back(std::move(track));
  }
  return out;
}

double min_clearance(const Trajectory & w, std::span<const ObstacleTrack> obstacles)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & t : obstacles) {
    for (std::size_t i = 0; i < w.waypoints.size() && i < t.boxes.size(); ++i) {
      best = std::min(best, geometry::signed_distance(t.boxes[i], w.waypoints[i]).value);
    }
  }
  return best;
}

}  // namespace sup::planning
