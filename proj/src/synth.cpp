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

#include "sup/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "sup/action_scorer.hpp"
#include "sup/object_matcher.hpp"
#include "sup/taxonomy.hpp"

namespace sup::synth
{

namespace
{

double q6(double x)
{
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

Vec2 q6(Vec2 p) {return {q6(p.x), q6(p.y)};}

struct Template
{
  const char * name;
  std::vector<std::string> tokens;
  const char * category;
  std::array<double, 3> size;
  const char * motion;
  const char * influence;
  std::vector<std::string> summary;
  const char * decision_action;
  const char * subject;
  const char * duration;
  const char * road;
  double accel;
  // Lateral offset of the final waypoint and the shape of the lateral motion.
  double lateral;
  enum class Shape { none, smooth, quadratic, bump } shape;
  // Object placement ahead of the ego and its velocity.
  double obj_x;
  double obj_y;
  Vec2 obj_velocity;
  double v_lo;
  double v_hi;
  // When set, the ego stops this far short of the object's center instead of
  // using `accel`.
  double stop_short;
};

const std::vector<Template> & templates()
{
  using S = Template::Shape;
  static const std::vector<Template> t{
    {"pedestrian_crossing", {"Slow down", "Stop", "Wait"}, "pedestrian", {0.6, 0.6, 1.7},
      "walking across the crosswalk", "blocks the ego lane ahead",
      {"A pedestrian is crossing the road in front of you.",
        "The crosswalk ahead is occupied."},
      "Stop", "the pedestrian", "until the crosswalk is clear", "urban", -3.0, 0.0, S::none,
      16.0, 1.5, {0.0, -1.2}, 4.0, 8.0, 7.0},
    {"lead_brake", {"Slow down", "Go straight slowly"}, "car", {4.5, 1.9, 1.5},
      "braking in the ego lane", "forces the ego vehicle to keep a larger gap",
      {"The vehicle ahead is braking.", "Traffic in your lane is slowing down."},
      "Slow down", "the lead vehicle", "for the next 3 seconds", "urban", -2.0, 0.0, S::none,
      16.0, 0.0, {6.0, 0.0}, 6.0, 10.0, 0.0},
    {"construction", {"Slow down", "Shift slightly to the left", "Go straight at a constant speed"},
      "traffic cone", {0.4, 0.4, 0.7}, "static on the right edge of the lane",
      "narrows the usable lane width",
      {"Traffic cones block the right side of your lane.",
        "Construction workers are on the roadside."},
      "Shift slightly to the left", "the traffic cones", "while passing the work zone", "urban",
      -1.0, 1.0, S::smooth, 14.0, -1.5, {0.0, 0.0}, 5.0, 12.0, 0.0},
    {"overtake", {"Change lane to the left", "Speed up", "Change lane to the right"}, "truck",
      {8.0, 2.5, 3.2}, "driving slowly in the ego lane", "limits the ego vehicle speed",
      {"A slow truck is driving in your lane.", "The left lane is clear."},
      "Change lane to the left", "the slow truck", "over the next 3 seconds", "highway", 1.0,
      3.5, S::bump, 25.0, 0.0, {15.0, 0.0}, 8.0, 14.0, 0.0},
    {"right_turn", {"Slow down", "Turn right", "Speed up"}, "cyclist", {1.8, 0.6, 1.7},
      "waiting at the corner", "may enter the turning path",
      {"A cyclist is waiting at the right corner of the intersection.",
        "The traffic light is green."},
      "Turn right", "the intersection", "after the cyclist passes", "urban", -1.5, -4.0,
      S::quadratic, 24.0, -7.0, {0.0, 0.0}, 5.0, 9.0, 0.0},
    {"police", {"Slow down", "Stop"}, "traffic police", {0.6, 0.6, 1.8},
      "standing in the road and signaling", "requires the ego vehicle to stop",
      {"There are traffic police on the road ahead.", "The traffic police signal to stop."},
      "Stop", "the traffic police", "until signaled to proceed", "urban", -3.5, 0.0, S::none,
      20.0, 0.5, {0.0, 0.0}, 5.0, 10.0, 8.0},
    {"cruise", {"Go straight at a constant speed"}, "car", {4.5, 1.9, 1.5},
      "driving at a steady speed", "sets the pace of the ego lane",
      {"A vehicle is driving in the distance in front of you."},
      "Go straight at a constant speed", "the road ahead", "for the next 3 seconds", "suburban",
      0.0, 0.0, S::none, 35.0, 0.0, {10.0, 0.0}, 8.0, 14.0, 0.0},
    {"lane_end", {"Speed up", "Change lane to the right"}, "bus", {12.0, 2.6, 3.2},
      "driving in the right lane", "occupies the target lane",
      {"Your lane ends ahead.", "A bus is driving in the right lane ahead of you."},
      "Change lane to the right", "the bus", "after passing the bus", "highway", 0.8, -3.5,
      S::smooth, 30.0, -3.5, {12.0, 0.0}, 8.0, 12.0, 0.0},
  };
  return t;
}

const std::vector<std::string> & lanes()
{
  static const std::vector<std::string> l{
    "three lanes with the ego vehicle in the middle lane",
    "two lanes with the ego vehicle in the right lane",
    "two lanes with the ego vehicle in the left lane",
    "single lane road",
  };
  return l;
}

double lateral_at(const Template & tp, double u)
{
  using S = Template::Shape;
  switch (tp.shape) {
    case S::none: return 0.0;
    case S::smooth: return tp.lateral * u * u * (3.0 - 2.0 * u);
    case S::quadratic: return tp.lateral * u * u;
    case S::bump: return tp.lateral * std::sin(std::numbers::pi * u);
  }
  return 0.0;
}

// Distance covered by time t from speed v0 under constant acceleration a,
// stopping at zero speed.
double travel(double v0, double a, double t)
{
  if (a < 0.0) {
    const double t_stop = -v0 / a;
    if (t >= t_stop) {
      return v0 * t_stop + 0.5 * a * t_stop * t_stop;
    }
  }
  return v0 * t + 0.5 * a * t * t;
}

template<class T>
const T & pick(Rng & rng, const std::vector<T> & v)
{
  return v[rng.index(v.size())];
}

}  // namespace

double Rng::uniform(double lo, double hi)
{
  const double u = static_cast<double>(gen_() >> 11) * 0x1p-53;
  return lo + (hi - lo) * u;
}

std::size_t Rng::index(std::size_t n)
{
  return static_cast<std::size_t>(gen_() % n);
}

bool Rng::chance(double p)
{
  return uniform(0.0, 1.0) < p;
}

std::vector<CameraModel> cameras()
{
  return {CameraModel::facing("front", 1266.0, 1266.0, 800.0, 450.0, 1600, 900, {1.5, 0.0, 1.5})};
}

std::vector<ScenarioRecord> corpus(std::size_t count, std::uint64_t seed)
{
  Rng rng(seed);
  const auto & tax = Taxonomy::defaults();
  const auto cams = cameras();
  const auto & tpl = templates();
  std::vector<ScenarioRecord> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const auto & tp = tpl[rng.index(tpl.size())];
    ScenarioRecord r;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%05zu", n);
    r.id = id;
    r.frames.push_back({"front", "frames/" + r.id + "/front.jpg", 0.0});

    r.environment.weather = pick(rng, tax.weather_labels());
    r.environment.time = pick(rng, tax.time_labels());
    r.environment.road = tp.road;
    r.environment.lane = pick(rng, lanes());

    Detection3D det;
    det.category = tp.category;
    det.center = {q6(tp.obj_x + rng.uniform(-2.0, 2.0)), q6(tp.obj_y + rng.uniform(-0.3, 0.3)),
      q6(tp.size[2] / 2.0)};
    det.size = tp.size;
    det.yaw = q6(rng.uniform(-0.1, 0.1));
    for (double t : {-1.0, -0.5}) {
      det.history.push_back({t, q6(Vec2{det.center[0], det.center[1]} + t * tp.obj_velocity)});
    }

    CriticalObject obj;
    obj.category = tp.category;
    auto box = matching::project_box(det, cams.front());
    if (!box) {
      box = BBox2D{700.0, 350.0, 900.0, 550.0};
    }
    const double jx = rng.uniform(-3.0, 3.0);
    const double jy = rng.uniform(-3.0, 3.0);
    obj.box = {q6(std::max(0.0, box->x1 + jx)), q6(std::max(0.0, box->y1 + jy)),
      q6(box->x2 + jx), q6(box->y2 + jy)};
    if (!(obj.box.x2 > obj.box.x1 + 1.0 && obj.box.y2 > obj.box.y1 + 1.0)) {
      obj.box = {q6(box->x1), q6(box->y1), q6(box->x2), q6(box->y2)};
    }
    r.critical_objects.push_back(obj);

    ObjectAnalysis an;
    an.object = 0;
    an.motion_state = tp.motion;
    an.influence = tp.influence;
    r.analyses.push_back(an);

    std::string summary;
    for (const auto & s : tp.summary) {
      summary += (summary.empty() ? "" : " ") + s;
    }
    r.scene_summary = summary;

    r.meta_actions = make_sequence(tp.tokens, tax);
    r.decision = {make_action(tp.decision_action, tax), tp.subject, tp.duration};

    const double v0 = q6(rng.uniform(tp.v_lo, tp.v_hi));
    double accel = tp.accel;
    if (tp.stop_short > 0.0) {
      accel = -v0 * v0 / (2.0 * std::max(1.0, det.center[0] - tp.stop_short));
    }
    r.trajectory.dt = 0.5;
    for (int k = 0; k < 7; ++k) {
      const double t = 0.5 * k;
      r.trajectory.waypoints.push_back(q6(Vec2{travel(v0, accel, t), lateral_at(tp, t / 3.0)}));
    }
    r.ego.position = {0.0, 0.0};
    r.ego.heading = 0.0;
    r.ego.speed = v0;
    for (double t : {-2.0, -1.5, -1.0, -0.5}) {
      r.ego.history.push_back({t, q6(Vec2{v0 * t, 0.0}), 0.0, v0});
    }

    std::vector<Detection3D> dets{det};
    Detection3D parked;
    parked.category = "car";
    const double side = rng.chance(0.5) ? 1.0 : -1.0;
    parked.center = {q6(rng.uniform(12.0, 30.0)), q6(side * rng.uniform(7.0, 9.0)), 0.75};
    parked.size = {4.5, 1.9, 1.5};
    parked.yaw = 0.0;
    parked.history = {{-1.0, {parked.center[0], parked.center[1]}},
      {-0.5, {parked.center[0], parked.center[1]}}};
    dets.push_back(parked);
    r.detections = std::move(dets);

    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScenarioRecord> predictions(
  const std::vector<ScenarioRecord> & refs, std::uint64_t seed)
{
  Rng rng(seed ^ 0x5bd1e995ULL);
  const auto & tax = Taxonomy::defaults();
  const auto & subs = actions::default_substitutions();
  std::vector<ScenarioRecord> out;
  out.reserve(refs.size());
  for (const auto & ref : refs) {
    ScenarioRecord p = ref;

    const double roll = rng.uniform(0.0, 1.0);
    auto & seq = p.meta_actions;
    if (roll < 0.4) {
      // unchanged
    } else if (roll < 0.7) {
      const std::size_t i = rng.index(seq.size());
      const auto it = subs.find(seq[i].token);
      const std::string tok = it != subs.end() ? pick(rng, it->second) :
        pick(rng, tax.meta_actions());
      seq[i] = make_action(tok, tax);
    } else if (roll < 0.9 && seq.size() > 1) {
      seq.pop_back();
    } else {
      seq.push_back(make_action(pick(rng, tax.meta_actions()), tax));
    }

    if (!rng.chance(0.8)) {
      p.environment.weather = pick(rng, tax.weather_labels());
    }
    if (!rng.chance(0.9)) {
      p.environment.time = pick(rng, tax.time_labels());
    }
    const auto & tp = templates();
    std::string summary;
    for (const auto & t : tp) {
      if (!t.summary.empty() && ref.scene_summary.rfind(t.summary.front(), 0) == 0) {
        summary = t.summary.front();
        for (std::size_t s = 1; s < t.summary.size(); ++s) {
          if (rng.chance(0.7)) {
            summary += " " + t.summary[s];
          }
        }
        break;
      }
    }
    if (summary.empty()) {
      summary = ref.scene_summary;
    }
    if (rng.chance(0.2)) {
      summary += " A dog is running along the sidewalk.";
    }
    p.scene_summary = summary;

    const double ex = rng.uniform(-0.6, 0.6);
    const double ey = rng.uniform(-0.4, 0.4);
    for (std::size_t k = 1; k < p.trajectory.waypoints.size(); ++k) {
      const double t = p.trajectory.time_at(k);
      p.trajectory.waypoints[k] = q6(p.trajectory.waypoints[k] + Vec2{ex * t, ey * t});
    }
    out.push_back(std::move(p));
  }
  return out;
}

dataset::DriveLog brake_log(double duration, double speed, double brake_at, double decel)
{
  dataset::DriveLog log;
  const int n = static_cast<int>(std::llround(duration * 10.0));
  const double t_stop = brake_at - speed / decel;
  for (int i = 0; i < n; ++i) {
    const double t = i / 10.0;
    dataset::DriveSample s;
    s.t = t;
    if (t < brake_at) {
      s.speed = speed;
    } else if (t < t_stop) {
      s.speed = speed + decel * (t - brake_at);
      s.accel = decel;
    }
    log.samples.push_back(s);
  }
  return log;
}

dataset::DriveLog swerve_log(
  double duration, const std::vector<double> & starts, double peak, double speed)
{
  dataset::DriveLog log;
  const int n = static_cast<int>(std::llround(duration * 10.0));
  for (int i = 0; i < n; ++i) {
    const double t = i / 10.0;
    dataset::DriveSample s;
    s.t = t;
    s.speed = speed;
    for (double t0 : starts) {
      if (t >= t0 && t < t0 + 1.0) {
        s.yaw_rate = peak * std::sin(std::numbers::pi * (t - t0));
        s.steering = s.yaw_rate;
      }
    }
    log.samples.push_back(s);
  }
  return log;
}

}  // namespace sup::synth
