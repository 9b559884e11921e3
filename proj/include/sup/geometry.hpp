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

#ifndef SUP__GEOMETRY_HPP_
#define SUP__GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <numbers>

namespace sup::geometry
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend Vec2 operator+(Vec2 a, Vec2 b) {return {a.x + b.x, a.y + b.y};}
  friend Vec2 operator-(Vec2 a, Vec2 b) {return {a.x - b.x, a.y - b.y};}
  friend Vec2 operator*(double s, Vec2 a) {return {s * a.x, s * a.y};}
  friend bool operator==(const Vec2 &, const Vec2 &) = default;
};

inline double dot(Vec2 a, Vec2 b) {return a.x * b.x + a.y * b.y;}
inline double norm(Vec2 a) {return std::hypot(a.x, a.y);}
inline double squared_norm(Vec2 a) {return a.x * a.x + a.y * a.y;}

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Rectangle in the plane: `length` along the heading, `width` across it.
struct OrientedBox
{
  Vec2 center;
  double length{0.0};
  double width{0.0};
  double yaw{0.0};

  friend bool operator==(const OrientedBox &, const OrientedBox &) = default;
};

/// Corners in counter-clockwise order starting at front-left.
std::array<Vec2, 4> corners(const OrientedBox & box);

/// Point expressed in the box frame (x along heading).
Vec2 to_box_frame(const OrientedBox & box, Vec2 p);

struct SignedDistance
{
  double value{0.0};
  /// d(value)/d(point); unit length except where the distance is non-smooth.
  Vec2 gradient;
};

/// Euclidean distance to the rectangle outside, minus the distance to the
/// nearest edge inside.
SignedDistance signed_distance(const OrientedBox & box, Vec2 p);

/// Separating-axis test. Touching boxes count as overlapping.
bool overlaps(const OrientedBox & a, const OrientedBox & b);

}  // namespace sup::geometry

#endif  // SUP__GEOMETRY_HPP_
