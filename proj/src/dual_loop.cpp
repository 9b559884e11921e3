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

#include "sup/dual_loop.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sup::planning
{

using io::Json;

namespace
{

constexpr double kMicro = 1e6;

double to_s(std::int64_t us) {return static_cast<double>(us) / kMicro;}

struct SlowResult
{
  std::uint64_t seq{0};
  std::int64_t issued_us{0};
  Trajectory trajectory;
};

struct Pending
{
  std::uint64_t seq{0};
  std::int64_t issued_us{0};
  std::int64_t completed_us{0};
  Trajectory trajectory;
};

// Velocity of the segment of `traj` that contains time t.
Vec2 velocity_at(const Trajectory & traj, double t)
{
  const auto & w = traj.waypoints;
  const double u = std::clamp(t / traj.dt, 0.0, static_cast<double>(w.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(u), w.size() - 2);
  return (1.0 / traj.dt) * (w[i + 1] - w[i]);
}

EgoState advance(const EgoState & prev, const Trajectory & traj, double t)
{
  EgoState s;
  s.position = sample_at(traj, t);
  const Vec2 v = velocity_at(traj, t);
  s.speed = geometry::norm(v);
  s.heading = s.speed > 0.0 ? std::atan2(v.y, v.x) : prev.heading;
  return s;
}

Trajectory shifted(const Trajectory & traj, double offset, Vec2 anchor)
{
  Trajectory out;
  out.dt = traj.dt;
  out.waypoints.reserve(traj.waypoints.size());
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    out.waypoints.push_back(sample_at(traj, traj.time_at(i) + offset));
  }
  out.waypoints.front() = anchor;
  return out;
}

Trajectory extrapolate(const EgoState & ego, double dt, std::size_t steps)
{
  Trajectory out;
  out.dt = dt;
  const Vec2 dir{std::cos(ego.heading), std::sin(ego.heading)};
  for (std::size_t i = 0; i < steps; ++i) {
    out.waypoints.push_back(ego.position + (ego.speed * static_cast<double>(i) * dt) * dir);
  }
  return out;
}

std::vector<ObstacleTrack> obstacles_at(
  const std::vector<Detection3D> & dets, double t, double dt, std::size_t steps)
{
  std::vector<Detection3D> moved = dets;
  const auto tracks0 = predict_obstacles(dets, 1.0, 2);
  for (std::size_t k = 0; k < moved.size(); ++k) {
    const Vec2 v = tracks0[k].boxes[1].center - tracks0[k].boxes[0].center;
    moved[k].center[0] += v.x * t;
    moved[k].center[1] += v.y * t;
  }
  return predict_obstacles(moved, dt, steps);
}

}  // namespace

LatencyModel LatencyModel::constant(double ms)
{
  return sequence({ms});
}

LatencyModel LatencyModel::sequence(std::vector<double> ms)
{
  if (ms.empty()) {
    throw std::invalid_argument("latency sequence must not be empty");
  }
  LatencyModel m;
  m.kind_ = ms.size() == 1 ? Kind::constant : Kind::sequence;
  for (double v : ms) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("latency must be finite and >= 0");
    }
    m.values_us_.push_back(std::llround(v * 1e3));
  }
  return m;
}

LatencyModel LatencyModel::jitter(double mean_ms, double spread_ms, std::uint64_t seed)
{
  if (!std::isfinite(spread_ms) || spread_ms < 0.0) {
    throw std::invalid_argument("latency spread must be finite and >= 0");
  }
  LatencyModel m = constant(mean_ms);
  m.kind_ = Kind::jitter;
  m.spread_us_ = std::llround(spread_ms * 1e3);
  m.seed_ = seed;
  return m;
}

std::int64_t LatencyModel::latency_us(std::uint64_t seq) const
{
  switch (kind_) {
    case Kind::constant:
      return values_us_.front();
    case Kind::sequence:
      return values_us_[seq % values_us_.size()];
    case Kind::jitter: {
        std::mt19937_64 gen(seed_ ^ (0x9e3779b97f4a7c15ULL * (seq + 1)));
        const double u = static_cast<double>(gen() >> 11) * 0x1p-53;
        const auto offset = std::llround((2.0 * u - 1.0) * static_cast<double>(spread_us_));
        return std::max<std::int64_t>(0, values_us_.front() + offset);
      }
  }
  return 0;
}

std::int64_t LatencyModel::max_latency_us() const
{
  const auto top = *std::max_element(values_us_.begin(), values_us_.end());
  return kind_ == Kind::jitter ? top + spread_us_ : top;
}

std::string LatencyModel::describe() const
{
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant:
      os << "constant " << values_us_.front() << "us";
      break;
    case Kind::sequence:
      os << "sequence";
      for (auto v : values_us_) {
        os << ' ' << v << "us";
      }
      break;
    case Kind::jitter:
      os << "jitter " << values_us_.front() << "us +/- " << spread_us_ << "us seed " << seed_;
      break;
  }
  return os.str();
}

SlowSource cruise_source(double speed, double dt, std::size_t steps)
{
  return [speed, dt, steps](const SlowRequest & req) {
           EgoState e = req.ego;
           e.speed = speed;
           return extrapolate(e, dt, steps);
         };
}

Vec2 sample_at(const Trajectory & traj, double t)
{
  const auto & w = traj.waypoints;
  if (w.size() < 2) {
    throw std::invalid_argument("trajectory needs at least two waypoints");
  }
  const double u = t / traj.dt;
  std::size_t i;
  if (u <= 0.0) {
    i = 0;
  } else {
    i = std::min(static_cast<std::size_t>(u), w.size() - 2);
  }
  const double f = u - static_cast<double>(i);
  return w[i] + f * (w[i + 1] - w[i]);
}

std::size_t tick_count(double duration_s, double hz)
{
  if (!(hz > 0.0) || !std::isfinite(hz)) {
    throw std::invalid_argument("fast tick rate must be > 0");
  }
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
    throw std::invalid_argument("duration must be finite and >= 0");
  }
  return static_cast<std::size_t>(std::floor(duration_s * hz + 1e-9));
}

std::optional<std::int64_t> DualLoopTrace::max_age_us() const
{
  std::optional<std::int64_t> best;
  for (const auto & t : ticks) {
    if (t.age_us && (!best || *t.age_us > *best)) {
      best = t.age_us;
    }
  }
  return best;
}

std::size_t DualLoopTrace::no_reference_ticks() const
{
  return static_cast<std::size_t>(
    std::count_if(ticks.begin(), ticks.end(), [](const TickRecord & t) {return t.no_reference;}));
}

DualLoopTrace dual_loop(
  const SlowSource & source, const LatencyModel & latency, const DualLoopConfig & cfg,
  const EgoState & initial)
{
  const std::size_t n_ticks = tick_count(cfg.duration_s, cfg.fast_hz);
  if (!(cfg.dt > 0.0) || cfg.steps < 2) {
    throw std::invalid_argument("bootstrap path needs dt > 0 and >= 2 steps");
  }
  cfg.planner.validate();

  DualLoopTrace trace;
  trace.fast_hz = cfg.fast_hz;
  trace.duration_s = cfg.duration_s;
  trace.latency = cfg.slow_enabled ? latency.describe() : "disabled";

  const auto tick_time = [&](std::size_t j) {
      return std::llround(static_cast<double>(j) * kMicro / cfg.fast_hz);
    };
  const std::int64_t period_us = std::max<std::int64_t>(1, tick_time(1));

  LatestValueMailbox<SlowResult> mailbox;
  std::optional<Pending> pending;
  bool issue_due = cfg.slow_enabled;
  std::int64_t next_issue_us = 0;
  std::uint64_t next_seq = 0;

  EgoState ego = initial;
  ego.history.clear();
  std::optional<Trajectory> last_fast;
  std::int64_t last_fast_us = 0;

  const auto ego_at = [&](std::int64_t t_us) {
      if (!last_fast) {
        return ego;
      }
      return advance(ego, *last_fast, to_s(t_us - last_fast_us));
    };

  for (std::size_t j = 0; j < n_ticks; ++j) {
    const std::int64_t now = tick_time(j);

    for (;;) {
      if (!pending && issue_due && next_issue_us <= now) {
        Pending p;
        p.seq = next_seq++;
        p.issued_us = next_issue_us;
        p.completed_us = p.issued_us + latency.latency_us(p.seq);
        SlowRequest req{p.seq, to_s(p.issued_us), ego_at(p.issued_us)};
        p.trajectory = source(req);
        pending = std::move(p);
        issue_due = false;
      } else if (pending && pending->completed_us <= now) {
        mailbox.write({pending->seq, pending->issued_us, pending->trajectory});
        trace.slow.push_back({pending->seq, pending->issued_us, pending->completed_us});
        next_issue_us = std::max(pending->completed_us, pending->issued_us + period_us);
        issue_due = true;
        pending.reset();
      } else {
        break;
      }
    }

    TickRecord rec;
    rec.tick = j;
    rec.time_us = now;
    rec.ego = ego.position;

    PlannerInputs in;
    in.ego = ego;
    if (auto msg = mailbox.read()) {
      rec.slow_seq = msg->seq;
      rec.age_us = now - msg->issued_us;
      rec.no_reference = false;
      in.w_slow = shifted(msg->trajectory, to_s(*rec.age_us), ego.position);
    } else if (last_fast) {
      in.w_slow = shifted(*last_fast, to_s(now - last_fast_us), ego.position);
    } else {
      in.w_slow = extrapolate(ego, cfg.dt, cfg.steps);
    }
    in.obstacles = obstacles_at(cfg.obstacles, to_s(now), in.w_slow.dt, in.w_slow.waypoints.size());

    auto result = refine_detailed(in, cfg.planner);
    rec.objective = result.objective_history.back();
    rec.fast = result.trajectory;
    rec.output_us = now;

    last_fast = std::move(result.trajectory);
    last_fast_us = now;
    ego = ego_at(tick_time(j + 1));
    trace.ticks.push_back(std::move(rec));
  }
  return trace;
}

io::Json trace_to_json(const DualLoopTrace & trace, bool include_paths)
{
  Json j;
  j["schema"] = "sup-trace/1";
  j["fast_hz"] = trace.fast_hz;
  j["duration_s"] = trace.duration_s;
  j["latency"] = trace.latency;
  Json ticks = Json::array();
  for (const auto & t : trace.ticks) {
    Json r;
    r["tick"] = t.tick;
    r["t"] = to_s(t.time_us);
    r["output_t"] = to_s(t.output_us);
    r["slow_seq"] = t.slow_seq ? Json(*t.slow_seq) : Json(nullptr);
    r["age"] = t.age_us ? Json(to_s(*t.age_us)) : Json(nullptr);
    r["no_reference"] = t.no_reference;
    r["ego"] = Json::array({t.ego.x, t.ego.y});
    r["objective"] = t.objective;
    if (include_paths) {
      Json pts = Json::array();
      for (const auto & p : t.fast.waypoints) {
        pts.push_back(Json::array({p.x, p.y}));
      }
      r["fast"] = std::move(pts);
    }
    ticks.push_back(std::move(r));
  }
  j["ticks"] = std::move(ticks);
  Json slow = Json::array();
  for (const auto & s : trace.slow) {
    slow.push_back({{"seq", s.seq}, {"issued", to_s(s.issued_us)},
        {"completed", to_s(s.completed_us)}});
  }
  j["slow"] = std::move(slow);
  const auto age = trace.max_age_us();
  j["summary"] = {
    {"ticks", trace.ticks.size()},
    {"slow_results", trace.slow.size()},
    {"no_reference_ticks", trace.no_reference_ticks()},
    {"max_age", age ? Json(to_s(*age)) : Json(nullptr)},
  };
  return j;
}

}  // namespace sup::planning
