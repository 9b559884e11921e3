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

#ifndef SUP__SYNTH_HPP_
#define SUP__SYNTH_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "sup/dataset_pipeline.hpp"
#include "sup/scenario.hpp"

namespace sup::synth
{

/// Seeded source of uniform draws that does not depend on the standard
/// library's distribution implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);
  bool chance(double p);

private:
  std::mt19937_64 gen_;
};

/// Front camera used by the synthetic scenes (1600 x 900).
std::vector<CameraModel> cameras();

/// Annotated scenes built from a fixed set of maneuver templates. Values are
/// rounded to 6 decimals so the records survive a write/read cycle unchanged.
std::vector<ScenarioRecord> corpus(std::size_t count, std::uint64_t seed);

/// Model-style outputs for `refs`: perturbed meta-actions, environment,
/// summary and waypoints. Ids are kept so the two corpora pair up.
std::vector<ScenarioRecord> predictions(
  const std::vector<ScenarioRecord> & refs, std::uint64_t seed);

/// 10 Hz log: cruise at `speed`, then constant deceleration `decel` (< 0)
/// from `brake_at` until standstill, then rest until `duration`.
dataset::DriveLog brake_log(
  double duration = 12.0, double speed = 12.0, double brake_at = 5.0, double decel = -4.0);

/// 10 Hz constant-speed log with a one-second yaw-rate pulse of `peak`
/// (rad/s) starting at each time in `starts`.
dataset::DriveLog swerve_log(
  double duration, const std::vector<double> & starts, double peak = 0.4, double speed = 10.0);

}  // namespace sup::synth

#endif  // SUP__SYNTH_HPP_
