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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sup/canonical_json.hpp"
#include "sup/planning_metrics.hpp"

using namespace sup;
using namespace sup::metrics;
using geometry::overlaps;

namespace
{

Trajectory straight(double speed, std::size_t n = 7, double dt = 0.5)
{
  Trajectory t;
  t.dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    t.waypoints.push_back({speed * dt * static_cast<double>(i), 0.0});
  }
  return t;
}

Trajectory moved(Trajectory t, Vec2 d)
{
  for (auto & p : t.waypoints) {
    p = p + d;
  }
  return t;
}

OrientedBox random_box(std::mt19937_64 & g, double spread)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {{spread * u(g), spread * u(g)}, 0.3 + 4.0 * std::abs(u(g)), 0.3 + 2.0 * std::abs(u(g)),
    std::numbers::pi * u(g)};
}

OrientedBox rigid(const OrientedBox & b, double angle, Vec2 t)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {{c * b.center.x - s * b.center.y + t.x, s * b.center.x + c * b.center.y + t.y},
    b.length, b.width, b.yaw + angle};
}

ObstacleTrack static_agent(const OrientedBox & b, std::size_t n = 7)
{
  return {std::vector<OrientedBox>(n, b)};
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("identical trajectories")
{
  const auto t = straight(5.0);
  for (auto mode : {DeMode::at_horizon, DeMode::cumulative_mean}) {
    const auto r = displacement_error(t, t, default_horizons(), mode);
    for (double v : r.per_horizon) {
      CHECK(v == 0.0);
    }
    CHECK(r.avg == 0.0);
  }
}

TEST_CASE("constant offset")
{
  const auto gt = straight(5.0);
  const auto pred = moved(gt, {1.0, 0.0});
  for (auto mode : {DeMode::at_horizon, DeMode::cumulative_mean}) {
    const auto r = displacement_error(pred, gt, default_horizons(), mode);
    for (double v : r.per_horizon) {
      CHECK(v == 1.0);
    }
  }
}

TEST_CASE("5 m/s against 4 m/s")
{
  const auto gt = straight(5.0);
  const auto pred = straight(4.0);
  const auto a = displacement_error(pred, gt, default_horizons(), DeMode::at_horizon);
  const auto c = displacement_error(pred, gt, default_horizons(), DeMode::cumulative_mean);
  const double at[] = {1.0, 2.0, 3.0};
  const double cm[] = {0.75, 1.25, 1.75};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(a.per_horizon[i] - at[i]) <= 1e-12);
    CHECK(std::abs(c.per_horizon[i] - cm[i]) <= 1e-12);
  }
  CHECK(std::abs(a.avg - 2.0) <= 1e-12);
  CHECK(std::abs(c.avg - 1.25) <= 1e-12);
}

TEST_CASE("horizon errors")
{
  const auto t = straight(5.0, 5);
  CHECK(horizon_index(t, 2.0) == 4);
  CHECK_THROWS_AS(horizon_index(t, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(horizon_index(t, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(horizon_index(t, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(displacement_error(t, t, default_horizons(), DeMode::at_horizon),
    std::invalid_argument);
  CHECK_THROWS_AS(displacement_error(straight(5.0, 13, 0.25), straight(5.0), default_horizons(),
    DeMode::at_horizon), std::invalid_argument);
  CHECK(parse_de_mode("cumulative-mean") == DeMode::cumulative_mean);
  CHECK(to_string(DeMode::at_horizon) == "at-horizon");
  CHECK_THROWS_AS(parse_de_mode("mean"), std::invalid_argument);
}

TEST_CASE("displacement error invariances")
{
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 300; ++i) {
    Trajectory a;
    Trajectory b;
    for (int k = 0; k < 7; ++k) {
      a.waypoints.push_back({u(g), u(g)});
      b.waypoints.push_back({u(g), u(g)});
    }
    const Vec2 d{u(g) * 100.0, u(g) * 100.0};
    for (auto mode : {DeMode::at_horizon, DeMode::cumulative_mean}) {
      const auto r = displacement_error(a, b, default_horizons(), mode);
      const auto rt = displacement_error(moved(a, d), moved(b, d), default_horizons(), mode);
      for (std::size_t h = 0; h < 3; ++h) {
        CHECK(r.per_horizon[h] >= 0.0);
        CHECK(rt.per_horizon[h] == doctest::Approx(r.per_horizon[h]).epsilon(1e-9));
      }
      CHECK(displacement_error(a, a, default_horizons(), mode).avg == 0.0);
    }
  }
}

TEST_CASE("collision examples")
{
  const auto pred = straight(5.0);
  const EgoDims dims;
  CHECK(first_collision_step(pred, {}, dims) == 0);
  for (bool c : collisions(pred, {}, dims, default_horizons())) {
    CHECK_FALSE(c);
  }
  // Agent sitting exactly on the ego footprint at step 1 only.
  std::vector<OrientedBox> boxes(7, OrientedBox{{-50.0, 0.0}, 4.0, 2.0, 0.0});
  boxes[1] = {pred.waypoints[1], dims.length, dims.width, 0.0};
  const std::vector<ObstacleTrack> agents{{boxes}};
  CHECK(first_collision_step(pred, agents, dims) == 1);
  const std::vector<double> hs{0.5, 1.0, 2.0, 3.0};
  for (bool c : collisions(pred, agents, dims, hs)) {
    CHECK(c);
  }
  // Step 0 is never checked.
  std::vector<OrientedBox> at_origin(7, OrientedBox{{-50.0, 0.0}, 4.0, 2.0, 0.0});
  at_origin[0] = {{0.0, 0.0}, 4.0, 2.0, 0.0};
  const std::vector<ObstacleTrack> origin{{at_origin}};
  CHECK(first_collision_step(pred, origin, dims) == 0);
  // Collision at step 4 (2 s) counts at 2 s and 3 s only.
  std::vector<OrientedBox> late(7, OrientedBox{{-50.0, 0.0}, 4.0, 2.0, 0.0});
  late[4] = {pred.waypoints[4] + Vec2{0.0, 1.5}, 4.0, 2.0, 0.3};
  const std::vector<ObstacleTrack> l{{late}};
  CHECK(collisions(pred, l, dims, default_horizons()) == std::vector<bool>{false, true, true});
  const std::vector<ObstacleTrack> short_track{{std::vector<OrientedBox>(3, boxes[0])}};
  CHECK_THROWS_AS(first_collision_step(pred, short_track, dims), std::invalid_argument);
}

TEST_CASE("ego heading follows the path and survives standstill")
{
  Trajectory t;
  t.dt = 0.5;
  t.waypoints = {{0, 0}, {0, 2}, {0, 2}, {-2, 2}};
  const auto fp = ego_footprints(t, {}, 0.3);
  REQUIRE(fp.size() == 3);
  CHECK(fp[0].yaw == doctest::Approx(std::numbers::pi / 2));
  CHECK(fp[1].yaw == fp[0].yaw);
  CHECK(fp[2].yaw == doctest::Approx(std::numbers::pi));
  Trajectory still;
  still.dt = 0.5;
  still.waypoints = {{1, 1}, {1, 1}};
  CHECK(ego_footprints(still, {}, 0.3)[0].yaw == 0.3);
}

TEST_CASE("45 degree near miss")
{
  const EgoDims dims;
  const OrientedBox ego{{0.0, 0.0}, dims.length, dims.width, 0.0};
  const double half_diag = std::sqrt(2.0);
  const OrientedBox agent{{dims.length / 2 + 0.05 + half_diag, 0.0}, 2.0, 2.0,
    std::numbers::pi / 4};
  CHECK_FALSE(overlaps(ego, agent));
  CHECK_FALSE(overlaps(agent, ego));
  CHECK_FALSE(oracle::sampled_overlap(ego, agent, 2000));
  CHECK(oracle::minkowski_gap(ego, agent) == doctest::Approx(0.05).epsilon(1e-9));
  // Closing the gap gives a collision.
  const OrientedBox closer{{dims.length / 2 - 0.05 + half_diag, 0.0}, 2.0, 2.0,
    std::numbers::pi / 4};
  CHECK(overlaps(ego, closer));
  CHECK(oracle::sampled_overlap(ego, closer, 2000));
}

TEST_CASE("touching boxes overlap")
{
  const OrientedBox a{{0.0, 0.0}, 2.0, 2.0, 0.0};
  const OrientedBox b{{2.0, 0.5}, 2.0, 2.0, 0.0};
  CHECK(overlaps(a, b));
  CHECK(oracle::minkowski_gap(a, b) == 0.0);
}

TEST_CASE("separating-axis test agrees with the sampling oracle")
{
  std::mt19937_64 g(5);
  int disagreements = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_box(g, 3.0);
    const auto b = random_box(g, 3.0);
    const bool sat = overlaps(a, b);
    const bool sampled = oracle::sampled_overlap(a, b, 2000);
    const double gap = oracle::minkowski_gap(a, b);
    CHECK(sat == (gap <= 0.0));
    if (sat != sampled) {
      ++disagreements;
      worst_gap = std::max(worst_gap, std::abs(gap));
      CHECK(std::abs(gap) <= 1e-6);
    }
  }
  MESSAGE(disagreements << " disagreements, largest |gap| " << worst_gap);
}

TEST_CASE("overlap is symmetric and invariant to rigid motions")
{
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(g, 3.0);
    const auto b = random_box(g, 3.0);
    if (std::abs(oracle::minkowski_gap(a, b)) < 1e-9) {
      continue;
    }
    const bool base = overlaps(a, b);
    CHECK(overlaps(b, a) == base);
    const double angle = std::numbers::pi * u(g);
    const Vec2 t{100.0 * u(g), 100.0 * u(g)};
    CHECK(overlaps(rigid(a, angle, t), rigid(b, angle, t)) == base);
  }
}

TEST_CASE("corpus evaluation is order independent")
{
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<MetricsSample> samples;
  for (int i = 0; i < 60; ++i) {
    MetricsSample s;
    s.id = "s" + std::to_string(i);
    s.gt = straight(4.0 + u(g));
    s.pred = s.gt;
    for (std::size_t k = 1; k < s.pred.waypoints.size(); ++k) {
      s.pred.waypoints[k] = s.pred.waypoints[k] + Vec2{u(g), 0.3 * u(g)};
    }
    if (i % 3 == 0) {
      s.agents.push_back(static_agent({{6.0 + 4.0 * u(g), 1.5 * u(g)}, 4.0, 1.8, u(g)}));
    }
    samples.push_back(s);
  }
  for (auto mode : {DeMode::at_horizon, DeMode::cumulative_mean}) {
    const auto ref = io::dump_canonical(report_to_json(evaluate(samples, default_horizons(),
      mode)));
    auto shuffled = samples;
    for (int rep = 0; rep < 5; ++rep) {
      std::shuffle(shuffled.begin(), shuffled.end(), g);
      CHECK(io::dump_canonical(report_to_json(evaluate(shuffled, default_horizons(), mode, {},
        3))) == ref);
    }
  }
  const auto r = evaluate(samples, default_horizons(), DeMode::at_horizon);
  const auto cr = collision_rate(samples, {}, default_horizons());
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(r.collision_per_horizon[h] == cr[h]);
    CHECK(cr[h] >= 0.0);
    CHECK(cr[h] <= 1.0);
  }
  CHECK(cr[0] <= cr[1]);
  CHECK(cr[1] <= cr[2]);
  CHECK_THROWS_AS(evaluate({}, default_horizons(), DeMode::at_horizon), std::invalid_argument);
}

TEST_CASE("report layout")
{
  MetricsReport r;
  r.mode = DeMode::cumulative_mean;
  r.horizons = {1.0, 2.0, 3.0};
  r.de_per_horizon = {0.75, 1.25, 1.75};
  r.de_avg = 1.25;
  r.collision_per_horizon = {0.0, 0.01, 0.02};
  r.collision_avg = 0.01;
  r.scenarios = 100;
  const auto j = report_to_json(r);
  CHECK(j.at("mode") == "cumulative-mean");
  CHECK(j.at("de_l2_m").at("2s") == 1.25);
  CHECK(j.at("collision_rate").at("avg") == 0.01);
  const auto table = render_table(r);
  CHECK(table.find("L2 (m)") != std::string::npos);
  CHECK(table.find("Collision (%)") != std::string::npos);
  CHECK(table.find("Avg") != std::string::npos);
  CHECK(table.find("1.750") != std::string::npos);
  CHECK(table.find("cumulative-mean") != std::string::npos);
}

TEST_CASE("stable sum ignores order")
{
  std::vector<double> v{1e16, 1.0, -1e16, 3.0, 0.5};
  const double s = stable_sum(v);
  std::reverse(v.begin(), v.end());
  CHECK(stable_sum(v) == s);
}

}  // TEST_SUITE
