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

#ifndef SUP__DUAL_LOOP_HPP_
#define SUP__DUAL_LOOP_HPP_

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sup/canonical_json.hpp"
#include "sup/scenario.hpp"
#include "sup/trajectory_planner.hpp"

namespace sup::planning
{

/// Single-slot latest-value channel. write() overwrites; read() never waits
/// for a producer.
template<typename T>
class LatestValueMailbox
{
public:
  void write(T value)
  {
    std::lock_guard<std::mutex> lock(mutex_);
    slot_ = std::move(value);
  }

  std::optional<T> read() const
  {
    std::lock_guard<std::mutex> lock(mutex_);
    return slot_;
  }

private:
  mutable std::mutex mutex_;
  std::optional<T> slot_;
};

/// Slow-branch latency per request, in microseconds.
class LatencyModel
{
public:
  static LatencyModel constant(double ms);
  /// Cycles through `ms` by request sequence number.
  static LatencyModel sequence(std::vector<double> ms);
  /// mean_ms plus a uniform offset in [-spread_ms, spread_ms], floored at 0.
  static LatencyModel jitter(double mean_ms, double spread_ms, std::uint64_t seed);

  std::int64_t latency_us(std::uint64_t seq) const;
  /// Largest latency this model can produce.
  std::int64_t max_latency_us() const;
  std::string describe() const;

private:
  enum class Kind { constant, sequence, jitter };
  Kind kind_{Kind::constant};
  std::vector<std::int64_t> values_us_;
  std::int64_t spread_us_{0};
  std::uint64_t seed_{0};
};

struct SlowRequest
{
  std::uint64_t seq{0};
  double issue_time{0.0};
  /// World-frame ego state when the request was issued.
  EgoState ego;
};

/// Produces a world-frame reference whose waypoint 0 is at request.ego.
using SlowSource = std::function<Trajectory(const SlowRequest &)>;

/// Straight line along the ego heading at `speed`, `steps` waypoints.
SlowSource cruise_source(double speed, double dt, std::size_t steps);

struct DualLoopConfig
{
  double fast_hz{10.0};
  double duration_s{10.0};
  bool slow_enabled{true};
  PlannerConfig planner;
  /// Waypoint spacing and count of the bootstrap path.
  double dt{0.5};
  std::size_t steps{7};
  /// World-frame obstacles moving at constant velocity from t = 0.
  std::vector<Detection3D> obstacles;
};

struct SlowEvent
{
  std::uint64_t seq{0};
  std::int64_t issued_us{0};
  std::int64_t completed_us{0};
};

struct TickRecord
{
  std::size_t tick{0};
  std::int64_t time_us{0};
  /// Time the fast output became available; equal to time_us because the
  /// fast path never waits on the slow path.
  std::int64_t output_us{0};
  std::optional<std::uint64_t> slow_seq;
  std::optional<std::int64_t> age_us;
  bool no_reference{true};
  Vec2 ego;
  double objective{0.0};
  Trajectory fast;
};

struct DualLoopTrace
{
  double fast_hz{0.0};
  double duration_s{0.0};
  std::string latency;
  std::vector<TickRecord> ticks;
  std::vector<SlowEvent> slow;

  /// Largest consumed age over ticks that had a reference.
  std::optional<std::int64_t> max_age_us() const;
  std::size_t no_reference_ticks() const;
};

/// Deterministic discrete-event simulation on a microsecond timebase. Slow
/// requests are issued back-to-back, no faster than the fast tick period.
/// Each fast tick refines the latest completed slow result, shifted forward by
/// its age. Before any result lands the tick plans from the previous fast
/// output, or from a straight-line extrapolation of `initial` on tick 0.
DualLoopTrace dual_loop(
  const SlowSource & source, const LatencyModel & latency, const DualLoopConfig & config,
  const EgoState & initial = {});

/// Number of fast ticks in `duration_s` at `hz`.
std::size_t tick_count(double duration_s, double hz);

io::Json trace_to_json(const DualLoopTrace & trace, bool include_paths = false);

/// Waypoint position at time `t`, linear between samples and extrapolated from
/// the last segment beyond the end.
Vec2 sample_at(const Trajectory & traj, double t);

}  // namespace sup::planning

#endif  // SUP__DUAL_LOOP_HPP_
