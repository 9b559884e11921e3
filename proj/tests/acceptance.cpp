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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "planner_cases.hpp"
#include "sup/action_scorer.hpp"
#include "sup/dataset_pipeline.hpp"
#include "sup/description_scorer.hpp"
#include "sup/dual_loop.hpp"
#include "sup/object_matcher.hpp"
#include "sup/parallel.hpp"
#include "sup/planning_metrics.hpp"
#include "sup/scenario_io.hpp"
#include "sup/synth.hpp"
#include "sup/trajectory_planner.hpp"

namespace fs = std::filesystem;
using namespace sup;

namespace
{

struct Outcome
{
  bool pass{true};
  std::string detail;
};

// Collects failed checks; the first few are kept for the detail column.
struct Checker
{
  Outcome out;
  int failures{0};

  void expect(bool ok, const std::string & what)
  {
    if (!ok) {
      ++failures;
      if (failures <= 3) {
        out.detail += (out.detail.empty() ? "" : "; ") + what;
      }
      out.pass = false;
    }
  }
  Outcome done(const std::string & summary)
  {
    if (failures > 3) {
      out.detail += "; " + std::to_string(failures - 3) + " more";
    }
    if (out.pass) {
      out.detail = summary;
    }
    return out;
  }
};

std::string num(double v, int prec = 6)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

// ------------------------------------------------------------------ criteria

Outcome description_example(double & limit_ms)
{
  limit_ms = 1.0;
  Checker c;
  const double s = description::aggregate_score(4, 0, 1, 9);
  c.expect(std::abs(s - 0.4166666666666667) < 1e-15, "score " + num(s, 17));
  c.expect(std::round(s * 1000.0) / 1000.0 == 0.417, "rounds to " + num(s, 3));
  return c.done("score " + num(s, 12));
}

std::vector<MetaActionSequence> all_sequences(const std::vector<std::string> & tokens,
  std::size_t max_len)
{
  std::vector<MetaActionSequence> out;
  std::vector<MetaActionSequence> layer{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<MetaActionSequence> next;
    for (const auto & s : layer) {
      for (const auto & t : tokens) {
        auto e = s;
        e.push_back(make_action(t));
        next.push_back(e);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

Outcome dp_oracle(double & limit_ms)
{
  limit_ms = 60000.0;
  Checker c;
  const std::vector<std::string> sub{"Slow down", "Wait", "Stop", "Turn left",
    "Go straight slowly", "Speed up"};
  const auto seqs = all_sequences(sub, 5);
  const std::size_t pairs = seqs.size() * seqs.size();
  oracle::Interner intern;
  std::vector<oracle::OracleSeq> ids;
  ids.reserve(seqs.size());
  for (const auto & s : seqs) {
    ids.push_back(intern(s));
  }
  std::atomic<std::size_t> mismatches{0};
  std::mutex first_lock;
  std::string first;
  parallel_for(seqs.size(), std::max(1u, std::thread::hardware_concurrency()),
    [&](std::size_t i) {
      const auto & r = seqs[i];
      for (std::size_t j = 0; j < seqs.size(); ++j) {
        const double dp = actions::align(r, seqs[j]).raw_score;
        const double or_ = oracle::oracle_align(ids[i], ids[j]);
        if (dp != or_ && mismatches++ == 0) {
          const std::lock_guard<std::mutex> hold(first_lock);
          first = "exhaustive mismatch " + num(dp) + " vs " + num(or_);
        }
      }
    });
  c.expect(mismatches == 0, std::to_string(mismatches.load()) + " exhaustive mismatches, " +
    first);
  std::mt19937_64 g(2024);
  const auto & vocab = Taxonomy::defaults().meta_actions();
  std::uniform_int_distribution<std::size_t> len(1, 7);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_sub(0, sub.size() - 1);
  for (int i = 0; i < 10000; ++i) {
    MetaActionSequence r, q;
    const bool narrow = i % 2 == 0;
    for (std::size_t k = len(g); k > 0; --k) {
      r.push_back(make_action(narrow ? sub[pick_sub(g)] : vocab[pick(g)]));
    }
    for (std::size_t k = len(g); k > 0; --k) {
      q.push_back(make_action(narrow ? sub[pick_sub(g)] : vocab[pick(g)]));
    }
    const double dp = actions::align(r, q).raw_score;
    const double or_ = oracle::oracle_align(r, q);
    if (dp != or_) {
      c.expect(false, "random mismatch " + num(dp) + " vs " + num(or_));
    }
  }
  return c.done(std::to_string(pairs) + " exhaustive + 10000 random pairs equal");
}

Outcome alternatives_fidelity(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  const auto ref = make_sequence({"Slow down", "Shift slightly to the right",
      "Go straight at a constant speed"});
  const std::vector<MetaActionSequence> listed{
    make_sequence({"Slow down", "Change lane to the right", "Go straight at a constant speed"}),
    make_sequence({"Slow down rapidly", "Shift slightly to the right",
      "Go straight at a constant speed"}),
    make_sequence({"Slow down", "Change lane to the right", "Go straight slowly"}),
    make_sequence({"Slow down", "Shift slightly to the right", "Go straight slowly"}),
  };
  const auto alts = actions::generate_alternatives(ref, actions::default_substitutions());
  std::vector<MetaActionSequence> refs{ref};
  refs.insert(refs.end(), alts.begin(), alts.end());
  for (std::size_t i = 0; i < listed.size(); ++i) {
    c.expect(std::find(alts.begin(), alts.end(), listed[i]) != alts.end(),
      "listed alternative " + std::to_string(i + 1) + " missing");
    const auto best = actions::score_with_alternatives(refs, listed[i]);
    c.expect(best.normalized_score == 1.0,
      "alternative " + std::to_string(i + 1) + " scores " + num(best.normalized_score));
  }
  return c.done(std::to_string(alts.size()) + " generated, all 4 listed present, each scores 1.0");
}

CameraModel axis_camera()
{
  CameraModel cam;
  cam.name = "axis";
  cam.fx = cam.fy = 500.0;
  cam.cx = cam.cy = 320.0;
  cam.width = cam.height = 640;
  return cam;
}

Outcome aiou(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  const BBox2D b{0, 0, 10, 10};
  c.expect(matching::a_iou(b, b) == 1.0, "identical boxes");
  c.expect(matching::a_iou({20, 20, 30, 30}, b) == 0.0, "disjoint boxes");
  c.expect(matching::a_iou({5, 0, 15, 10}, b) == 0.5, "half-shifted box");
  const BBox2D outer{0, 0, 20, 20};
  const BBox2D inner{5, 5, 10, 10};
  c.expect(matching::a_iou(outer, inner) == 1.0 && matching::a_iou(inner, outer) < 1.0,
    "asymmetry witness");
  Detection3D d;
  d.category = "car";
  d.center = {0.0, 0.0, 10.0};
  d.size = {2.0, 2.0, 2.0};
  const auto p = matching::project_box(d, axis_camera());
  c.expect(p.has_value(), "projection absent");
  if (p) {
    const double lo = 320.0 - 500.0 / 9.0;
    const double hi = 320.0 + 500.0 / 9.0;
    const double err = std::max({std::abs(p->x1 - lo), std::abs(p->y1 - lo),
        std::abs(p->x2 - hi), std::abs(p->y2 - hi)});
    c.expect(err < 1e-9, "projection error " + num(err));
  }
  return c.done("1.0 / 0.0 / 0.5, asymmetric, projection within 1e-9");
}

Outcome gradient_check(double & limit_ms)
{
  limit_ms = 30000.0;
  Checker c;
  std::mt19937_64 g(10);
  int checked = 0;
  double worst = 0.0;
  while (checked < 100) {
    const auto inst = cases::random_instance(g);
    if (!cases::away_from_kinks(inst, 1e-3)) {
      continue;
    }
    ++checked;
    const auto an = planning::gradient(inst.w, inst.in, inst.cfg);
    const double h = 1e-5;
    double diff_sq = 0.0;
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < an.size(); ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        auto plus = inst.w;
        auto minus = inst.w;
        (axis == 0 ? plus.waypoints[i].x : plus.waypoints[i].y) += h;
        (axis == 0 ? minus.waypoints[i].x : minus.waypoints[i].y) -= h;
        const double fd = (planning::objective(plus, inst.in, inst.cfg) -
          planning::objective(minus, inst.in, inst.cfg)) / (2.0 * h);
        const double a = axis == 0 ? an[i].x : an[i].y;
        diff_sq += (a - fd) * (a - fd);
        norm_sq += a * a;
      }
    }
    const double rel = std::sqrt(diff_sq) / std::max(std::sqrt(norm_sq), 1e-12);
    worst = std::max(worst, rel);
    c.expect(rel < 1e-6, "relative error " + num(rel));
  }
  return c.done("100 instances, worst relative error " + num(worst, 3));
}

Outcome refinement_contract(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  std::mt19937_64 g(11);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = cases::random_instance(g);
    const auto out = planning::refine(inst.in, inst.cfg);
    violations += planning::objective(out, inst.in, inst.cfg) >
      planning::objective(inst.in.w_slow, inst.in, inst.cfg);
  }
  c.expect(violations == 0, std::to_string(violations) + " violations");

  Trajectory kinked;
  kinked.dt = 0.5;
  kinked.waypoints = {{0.0, 0.0}, {1.3, 0.2}, {2.1, 0.9}, {2.5, 2.0}, {4.7, 2.2}};
  planning::PlannerConfig no_smooth;
  no_smooth.w_smooth = 0.0;
  c.expect(planning::refine(cases::inputs_for(kinked), no_smooth) == kinked,
    "unsmoothed fixed point moved");
  const auto straight = cases::line(7, 6.1, -0.7, {0.25, -1.5});
  for (double ws : {0.0, 0.5, 1.0, 25.0}) {
    planning::PlannerConfig cfg;
    cfg.w_smooth = ws;
    c.expect(planning::refine(cases::inputs_for(straight), cfg) == straight,
      "straight line moved at w_smooth " + num(ws));
  }
  auto far = cases::inputs_for(cases::line(7, 5.0));
  far.obstacles.push_back(cases::static_track({{10.0, 6.0}, 4.0, 2.0, 0.0}, 7));
  c.expect(planning::refine(far) == far.w_slow, "far obstacle moved the trajectory");
  return c.done("1000 instances, 0 violations; fixed points bit-exact");
}

Outcome dual_liveness(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  planning::DualLoopConfig cfg;
  cfg.fast_hz = 10.0;
  cfg.duration_s = 10.0;
  EgoState ego;
  ego.speed = 10.0;
  const auto run = [&] {
      return planning::dual_loop(planning::cruise_source(10.0, cfg.dt, cfg.steps),
               planning::LatencyModel::constant(410.0), cfg, ego);
    };
  const auto trace = run();
  c.expect(trace.ticks.size() == 100, std::to_string(trace.ticks.size()) + " fast outputs");
  std::size_t blocked = 0;
  for (const auto & t : trace.ticks) {
    blocked += t.output_us != t.time_us;
  }
  c.expect(blocked == 0, std::to_string(blocked) + " blocked ticks");
  const auto age = trace.max_age_us();
  c.expect(age.has_value() && *age <= 820000,
    "max age " + (age ? num(*age / 1e6) : std::string("none")));
  c.expect(planning::trace_to_json(run()) == planning::trace_to_json(trace),
    "repeat run differs");
  return c.done("100 outputs, 0 blocked, max age " + (age ? num(*age / 1e6) : "-") + " s");
}

Outcome metrics_check(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  Trajectory gt, pred;
  gt.dt = pred.dt = 0.5;
  for (int i = 0; i < 7; ++i) {
    gt.waypoints.push_back({2.5 * i, 0.0});
    pred.waypoints.push_back({2.0 * i, 0.0});
  }
  const auto hz = metrics::default_horizons();
  const auto a = metrics::displacement_error(pred, gt, hz, metrics::DeMode::at_horizon);
  const auto m = metrics::displacement_error(pred, gt, hz, metrics::DeMode::cumulative_mean);
  const double want_a[] = {1.0, 2.0, 3.0};
  const double want_m[] = {0.75, 1.25, 1.75};
  for (int i = 0; i < 3; ++i) {
    c.expect(std::abs(a.per_horizon[i] - want_a[i]) <= 1e-12,
      "at-horizon " + num(a.per_horizon[i], 17));
    c.expect(std::abs(m.per_horizon[i] - want_m[i]) <= 1e-12,
      "cumulative " + num(m.per_horizon[i], 17));
  }
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto box = [&] {
      return geometry::OrientedBox{{3.0 * u(g), 3.0 * u(g)}, 0.3 + 4.0 * std::abs(u(g)),
        0.3 + 2.0 * std::abs(u(g)), std::numbers::pi * u(g)};
    };
  int disagree = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = box();
    const auto y = box();
    if (geometry::overlaps(x, y) != oracle::sampled_overlap(x, y, 2000)) {
      ++disagree;
      const double gap = std::abs(oracle::minkowski_gap(x, y));
      worst = std::max(worst, gap);
      c.expect(gap <= 1e-6, "disagreement at |gap| " + num(gap));
    }
  }
  return c.done("DE exact; " + std::to_string(disagree) + " SAT/sampling disagreements" +
           (disagree ? ", largest |gap| " + num(worst, 3) : std::string()));
}

Outcome pipeline_determinism(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  const auto log = dataset::parse_drive_log(
    io::read_file(std::string(SUP_SYNTH_DATA) + "/brake.csv"));
  const dataset::MiningConfig cfg;
  const auto iv = dataset::mine_challenging(log, cfg);
  c.expect(iv.size() == 1, std::to_string(iv.size()) + " intervals");
  if (!iv.empty()) {
    const auto k = dataset::select_keyframe(log, iv[0], cfg);
    c.expect(k.timestamp == 4.25, "keyframe " + num(k.timestamp, 17));
  }
  const auto recs = synth::corpus(1000, 7);
  std::vector<std::string> ids;
  for (const auto & r : recs) {
    ids.push_back(r.id);
  }
  const auto n = dataset::count_splits(dataset::assign_splits(ids));
  c.expect(n.train == 750 && n.val == 100 && n.test == 150,
    "split " + std::to_string(n.train) + "/" + std::to_string(n.val) + "/" +
    std::to_string(n.test));
  return c.done("keyframe 4.25 s; split 750/100/150");
}

Outcome end_to_end(double & limit_ms)
{
  limit_ms = 0.0;
  Checker c;
  const std::string data = SUP_SYNTH_DATA;
  const std::vector<std::string> commands{
    "eval-actions --refs " + data + "/refs.sup --cands " + data + "/cands.sup",
    "eval-description --refs " + data + "/refs.sup --cands " + data + "/cands.sup",
    "match-objects --corpus " + data + "/cands.sup --calib " + data + "/calib.json",
    "refine --corpus " + data + "/cands.sup",
    "simulate-dual --jitter-ms 80",
    "metrics --pred " + data + "/cands.sup --gt " + data + "/refs.sup",
    "mine --log " + data + "/brake.csv",
    "keyframe --log " + data + "/swerve.csv",
    "validate --corpus " + data + "/refs.sup",
    "stats --corpus " + data + "/refs.sup",
  };
  const fs::path dir = fs::temp_directory_path() /
    ("sup-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const auto path = (dir / ("r" + std::to_string(i) + "_" + std::to_string(run))).string();
      const std::string cmd = std::string("\"") + SUP_BINARY + "\" --seed 7 --format machine " +
        commands[i] + " > \"" + path + "\" 2>/dev/null";
      const int status = std::system(cmd.c_str());
      c.expect(status == 0, "exit status " + std::to_string(status) + ": " + commands[i]);
      outputs[run] = io::read_file(path);
    }
    c.expect(!outputs[0].empty(), "empty report: " + commands[i]);
    c.expect(outputs[0] == outputs[1], "reports differ: " + commands[i]);
    bytes += outputs[0].size();
  }
  fs::remove_all(dir);
  return c.done(std::to_string(commands.size()) + " commands, " + std::to_string(bytes) +
           " report bytes identical");
}

struct Criterion
{
  int id;
  const char * name;
  std::function<Outcome(double &)> fn;
};

}  // namespace

int main()
{
  const std::vector<Criterion> criteria{
    {1, "description score worked example", description_example},
    {2, "alignment DP equals the oracle", dp_oracle},
    {3, "alternative sequences", alternatives_fidelity},
    {4, "aIoU and projection", aiou},
    {5, "planner gradient", gradient_check},
    {6, "refinement contract", refinement_contract},
    {7, "dual-loop liveness", dual_liveness},
    {8, "displacement error and SAT", metrics_check},
    {9, "pipeline determinism", pipeline_determinism},
    {10, "end-to-end determinism", end_to_end},
  };
  int failed = 0;
  for (const auto & cr : criteria) {
    double limit_ms = 0.0;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = cr.fn(limit_ms);
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (limit_ms > 0.0 && ms >= limit_ms) {
      o.pass = false;
      o.detail += "; took " + num(ms) + " ms, limit " + num(limit_ms) + " ms";
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-34s %10.3f ms  %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, ms,
      o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
    criteria.size());
  return failed == 0 ? 0 : 1;
}
