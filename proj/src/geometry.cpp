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

#include "sup/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sup::geometry
{

double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

std::array<Vec2, 4> corners(const OrientedBox & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  auto at = [&](double lx, double ly) {
      return Vec2{box.center.x + c * lx - s * ly, box.center.y + s * lx + c * ly};
    };
  return {at(hl, hw), at(-hl, hw), at(-hl, -hw), at(hl, -hw)};
}

Vec2 to_box_frame(const OrientedBox & box, Vec2 p)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Vec2 d = p - box.center;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

SignedDistance signed_distance(const OrientedBox & box, Vec2 p)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Vec2 local = to_box_frame(box, p);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const double ex = std::abs(local.x) - hl;
  const double ey = std::abs(local.y) - hw;
  const double sx = local.x < 0.0 ? -1.0 : 1.0;
  const double sy = local.y < 0.0 ? -1.0 : 1.0;

  Vec2 g_local;
  double value = 0.0;
  if (ex > 0.0 || ey > 0.0) {
    const double qx = std::max(ex, 0.0);
    const double qy = std::max(ey, 0.0);
    value = std::hypot(qx, qy);
    g_local = {sx * qx / value, sy * qy / value};
  } else if (ex >= ey) {
    value = ex;
    g_local = {sx, 0.0};
  } else {
    value = ey;
    g_local = {0.0, sy};
  }
  // Rotate the local gradient back into the world frame.
  return {value, {c * g_local.x - s * g_local.y, s * g_local.x + c * g_local.y}};
}

namespace
{

void project(const std::array<Vec2, 4> & pts, Vec2 axis, double & lo, double & hi)
{
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto & p : pts) {
    const double v = dot(p, axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

}  // namespace

bool overlaps(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = corners(a);
  const auto cb = corners(b);
  const std::array<Vec2, 4> axes{
    Vec2{std::cos(a.yaw), std::sin(a.yaw)}, Vec2{-std::sin(a.yaw), std::cos(a.yaw)},
    Vec2{std::cos(b.yaw), std::sin(b.yaw)}, Vec2{-std::sin(b.yaw), std::cos(b.yaw)}};
  for (const auto & axis : axes) {
    double alo, ahi, blo, bhi;
    project(ca, axis, alo, ahi);
    project(cb, axis, blo, bhi);
    if (ahi < blo || bhi < alo) {
      return false;
    }
  }
  return true;
}

}  // namespace sup::geometry
