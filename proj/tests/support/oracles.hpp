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

#ifndef SUP_TESTS__ORACLES_HPP_
#define SUP_TESTS__ORACLES_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sup/action_scorer.hpp"
#include "sup/geometry.hpp"
#include "sup/object_matcher.hpp"
#include "sup/scenario.hpp"

// Brute-force reference implementations. None of these share code with the
// library routines they check.
namespace sup::oracle
{

/// Best alignment score found by enumerating every order-preserving one-to-one
/// pairing of identical tokens. Unpaired reference tokens pay the missing
/// penalty, unpaired candidate tokens the redundant penalty. The order in which
/// misses and redundancies interleave does not change a total, so each pairing
/// stands for all of its interleavings. Lengths above 7 are rejected.
double oracle_align(
  std::span<const MetaAction> reference, std::span<const MetaAction> candidate,
  const actions::ScoreWeights & weights = {});

/// Token ids plus conservative flags; ids are only comparable when both sides
/// came from the same Interner.
struct OracleSeq
{
  std::vector<int> id;
  std::vector<bool> conservative;
};

class Interner
{
public:
  OracleSeq operator()(std::span<const MetaAction> seq);

private:
  std::map<std::string, int, std::less<>> ids_;
};

double oracle_align(
  const OracleSeq & reference, const OracleSeq & candidate,
  const actions::ScoreWeights & weights = {});

/// Maximum over every sequence of match / miss / redundant steps, all
/// interleavings included. Exponential; for lengths up to about 4.
double enumerate_interleavings(
  std::span<const MetaAction> reference, std::span<const MetaAction> candidate,
  const actions::ScoreWeights & weights = {});

/// Closed point-in-rectangle test from edge cross products.
bool inside(const geometry::OrientedBox & box, geometry::Vec2 p);

/// Signed point-to-rectangle distance from `per_edge` samples on each edge;
/// negative inside. Error is at most half the sample spacing.
double sampled_distance(const geometry::OrientedBox & box, geometry::Vec2 p, int per_edge = 4000);

/// Overlap by sampling: corners, `per_edge` points along each edge and an
/// interior grid of each box, tested against the other box.
bool sampled_overlap(
  const geometry::OrientedBox & a, const geometry::OrientedBox & b, int per_edge = 400);

/// Signed distance from the origin to the hull of all corner differences
/// a_i - b_j. Positive when the boxes are apart, negative when they overlap,
/// zero when they touch.
double minkowski_gap(const geometry::OrientedBox & a, const geometry::OrientedBox & b);

/// Pairs (critical, detection) with their aIoU value, as input for assignment
/// enumeration.
struct Candidate
{
  std::size_t critical;
  std::size_t detection;
  double value;
};

/// Every one-to-one subset of `candidates` with the largest total value.
/// Returns the chosen pairs sorted by (critical, detection).
std::vector<Candidate> best_assignment(std::span<const Candidate> candidates);

/// Pinhole projection of the 8 corners, no clipping. For boxes fully in front
/// of the camera.
BBox2D corner_hull(const Detection3D & det, const CameraModel & cam);

}  // namespace sup::oracle

#endif  // SUP_TESTS__ORACLES_HPP_
