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

#include "sup/planning_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sup/parallel.hpp"

namespace sup::metrics
{

using io::Json;

std::string to_string(DeMode mode)
{
  return mode == DeMode::at_horizon ? "at-horizon" : "cumulative-mean";
}

DeMode parse_de_mode(std::string_view text)
{
  if (text == "at-horizon") {
    return DeMode::at_horizon;
  }
  if (text == "cumulative-mean") {
    return DeMode::cumulative_mean;
  }
  throw std::invalid_argument("unknown DE mode '" + std::string(text) + "'");
}

double stable_sum(std::vector<double> values)
{
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) {
    s += v;
  }
  return s;
}

std::size_t horizon_index(const Trajectory & traj, double horizon)
{
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be > 0");
  }
  const double u = horizon / traj.dt;
  const double k = std::round(u);
  if (std::abs(u - k) > 1e-9) {
    throw std::invalid_argument("horizon is not a sampled timestep");
  }
  if (k > static_cast<double>(traj.waypoints.size()) - 1.0) {
    throw std::invalid_argument("horizon beyond trajectory coverage");
  }
  return static_cast<std::size_t>(k);
}

DisplacementResult displacement_error(
  const Trajectory & pred, const Trajectory & gt, std::span<const double> horizons,
  DeMode mode)
{
  if (pred.dt != gt.dt) {
    throw std::invalid_argument("prediction and ground truth differ in dt");
  }
  if (horizons.empty()) {
    throw std::invalid_argument("no horizons given");
  }
  DisplacementResult r;
  for (double h : horizons) {
    const std::size_t k = std::max(horizon_index(pred, h), horizon_index(gt, h));
    double v;
    if (mode == DeMode::at_horizon) {
      v = geometry::norm(pred.waypoints[k] - gt.waypoints[k]);
    } else {
      double s = 0.0;
      for (std::size_t i = 1; i <= k; ++i) {
        s += geometry::norm(pred.waypoints[i] - gt.waypoints[i]);
      }
      v = s / static_cast<double>(k);
    }
    r.per_horizon.push_back(v);
  }
  r.avg = std::accumulate(r.per_horizon.begin(), r.per_horizon.end(), 0.0) /
    static_cast<double>(r.per_horizon.size());
  return r;
}

std::vector<OrientedBox> ego_footprints(const Trajectory & pred, EgoDims dims, double heading)
{
  std::vector<OrientedBox> out;
  const auto & w = pred.waypoints;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const Vec2 d = w[i] - w[i - 1];
    if (d.x != 0.0 || d.y != 0.0) {
      heading = std::atan2(d.y, d.x);
    }
    out.push_back({w[i], dims.length, dims.width, heading});
  }
  return out;
}

std::size_t first_collision_step(
  const Trajectory & pred, std::span<const ObstacleTrack> agents, EgoDims dims,
  double initial_heading)
{
  const auto ego = ego_footprints(pred, dims, initial_heading);
  for (const auto & a : agents) {
    if (a.boxes.size() < pred.waypoints.size()) {
      throw std::invalid_argument("agent steps do not cover the prediction");
    }
  }
  for (std::size_t s = 0; s < ego.size(); ++s) {
    for (const auto & a : agents) {
      if (geometry::overlaps(ego[s], a.boxes[s + 1])) {
        return s + 1;
      }
    }
  }
  return 0;
}

std::vector<bool> collisions(
  const Trajectory & pred, std::span<const ObstacleTrack> agents, EgoDims dims,
  std::span<const double> horizons, double initial_heading)
{
  const std::size_t step = first_collision_step(pred, agents, dims, initial_heading);
  std::vector<bool> out;
  for (double h : horizons) {
    const std::size_t k = horizon_index(pred, h);
    out.push_back(step != 0 && step <= k);
  }
  return out;
}

std::vector<double> collision_rate(
  std::span<const MetricsSample> samples, EgoDims dims, std::span<const double> horizons)
{
  if (samples.empty()) {
    throw std::invalid_argument("empty corpus");
  }
  std::vector<std::size_t> hits(horizons.size(), 0);
  for (const auto & s : samples) {
    const auto c = collisions(s.pred, s.agents, dims, horizons, s.initial_heading);
    for (std::size_t h = 0; h < c.size(); ++h) {
      hits[h] += c[h] ? 1 : 0;
    }
  }
  std::vector<double> out;
  for (auto n : hits) {
    out.push_back(static_cast<double>(n) / static_cast<double>(samples.size()));
  }
  return out;
}

MetricsReport evaluate(
  std::span<const MetricsSample> samples, std::span<const double> horizons, DeMode mode,
  EgoDims dims, unsigned jobs)
{
  if (samples.empty()) {
    throw std::invalid_argument("empty corpus");
  }
  const std::size_t n = samples.size();
  const std::size_t nh = horizons.size();
  std::vector<DisplacementResult> de(n);
  std::vector<std::vector<bool>> col(n);
  parallel_for(n, jobs, [&](std::size_t i) {
      const auto & s = samples[i];
      de[i] = displacement_error(s.pred, s.gt, horizons, mode);
      col[i] = collisions(s.pred, s.agents, dims, horizons, s.initial_heading);
    });

  MetricsReport r;
  r.mode = mode;
  r.horizons.assign(horizons.begin(), horizons.end());
  r.scenarios = n;
  for (std::size_t h = 0; h < nh; ++h) {
    std::vector<double> vals(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      vals[i] = de[i].per_horizon[h];
      hits += col[i][h] ? 1 : 0;
    }
    r.de_per_horizon.push_back(stable_sum(std::move(vals)) / static_cast<double>(n));
    r.collision_per_horizon.push_back(static_cast<double>(hits) / static_cast<double>(n));
  }
  r.de_avg = std::accumulate(r.de_per_horizon.begin(), r.de_per_horizon.end(), 0.0) /
    static_cast<double>(nh);
  r.collision_avg =
    std::accumulate(r.collision_per_horizon.begin(), r.collision_per_horizon.end(), 0.0) /
    static_cast<double>(nh);
  return r;
}

namespace
{

std::string horizon_label(double h)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%gs", h);
  return buf;
}

}  // namespace

io::Json report_to_json(const MetricsReport & r)
{
  Json j;
  j["mode"] = to_string(r.mode);
  j["scenarios"] = r.scenarios;
  Json de = Json::object();
  Json cr = Json::object();
  for (std::size_t h = 0; h < r.horizons.size(); ++h) {
    de[horizon_label(r.horizons[h])] = r.de_per_horizon[h];
    cr[horizon_label(r.horizons[h])] = r.collision_per_horizon[h];
  }
  de["avg"] = r.de_avg;
  cr["avg"] = r.collision_avg;
  j["de_l2_m"] = std::move(de);
  j["collision_rate"] = std::move(cr);
  return j;
}

std::string render_table(const MetricsReport & r)
{
  std::ostringstream os;
  char buf[64];
  os << "DE mode: " << to_string(r.mode) << ", scenarios: " << r.scenarios << "\n";
  std::snprintf(buf, sizeof(buf), "%-16s", "metric");
  os << buf;
  for (double h : r.horizons) {
    std::snprintf(buf, sizeof(buf), " %9s", horizon_label(h).c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), " %9s\n", "Avg");
  os << buf;
  const auto row = [&](const char * name, const std::vector<double> & v, double avg, double s) {
      std::snprintf(buf, sizeof(buf), "%-16s", name);
      os << buf;
      for (double x : v) {
        std::snprintf(buf, sizeof(buf), " %9.3f", x * s);
        os << buf;
      }
      std::snprintf(buf, sizeof(buf), " %9.3f\n", avg * s);
      os << buf;
    };
  row("L2 (m)", r.de_per_horizon, r.de_avg, 1.0);
  row("Collision (%)", r.collision_per_horizon, r.collision_avg, 100.0);
  return os.str();
}

}  // namespace sup::metrics
