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

#include "sup/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sup/action_scorer.hpp"
#include "sup/config.hpp"
#include "sup/dataset_pipeline.hpp"
#include "sup/description_scorer.hpp"
#include "sup/dual_loop.hpp"
#include "sup/errors.hpp"
#include "sup/judge.hpp"
#include "sup/object_matcher.hpp"
#include "sup/parallel.hpp"
#include "sup/planning_metrics.hpp"
#include "sup/scenario_io.hpp"
#include "sup/synth.hpp"
#include "sup/trajectory_planner.hpp"

namespace sup::cli
{

namespace
{

using io::Json;

struct Common
{
  std::string config_path;
  std::string format{"table"};
  std::string out_path;
  std::uint64_t seed{7};
  unsigned jobs{0};
};

struct Context
{
  ToolConfig cfg;
  bool machine{false};
  std::string out_path;
  std::uint64_t seed{7};
  std::ostream * out{nullptr};

  void emit(const Json & report, const std::string & table) const
  {
    const std::string text = machine ? io::dump_canonical(report, 2) + "\n" : table;
    if (out_path.empty()) {
      *out << text;
    } else {
      io::write_file(out_path, text);
    }
  }
};

std::string f3(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string f6(double v)
{
  return io::format_fixed6(v);
}

std::string pad(std::string s, std::size_t w)
{
  if (s.size() < w) {
    s.append(w - s.size(), ' ');
  }
  return s;
}

std::vector<ScenarioRecord> load_corpus(const std::string & path, const ToolConfig & cfg)
{
  try {
    io::ParseOptions opt;
    opt.taxonomy = &cfg.taxonomy;
    return io::parse_corpus(io::read_file(path), opt);
  } catch (const SyntaxError & e) {
    throw SyntaxError(std::filesystem::path(path).filename().string() + ": " + e.what());
  } catch (const SchemaError & e) {
    throw SchemaError(std::filesystem::path(path).filename().string() + ": " + e.what());
  }
}

struct Pair
{
  const ScenarioRecord * ref;
  const ScenarioRecord * cand;
};

// Pairs two corpora by id, ordered by id.
std::vector<Pair> pair_by_id(
  const std::vector<ScenarioRecord> & refs, const std::vector<ScenarioRecord> & cands,
  const char * ref_name, const char * cand_name)
{
  std::map<std::string, const ScenarioRecord *> by_id;
  for (const auto & c : cands) {
    if (!by_id.emplace(c.id, &c).second) {
      throw SchemaError(std::string(cand_name) + ": duplicate id '" + c.id + "'");
    }
  }
  std::map<std::string, const ScenarioRecord *> ref_ids;
  for (const auto & r : refs) {
    if (!ref_ids.emplace(r.id, &r).second) {
      throw SchemaError(std::string(ref_name) + ": duplicate id '" + r.id + "'");
    }
  }
  std::vector<Pair> out;
  for (const auto & [id, r] : ref_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw SchemaError(std::string(cand_name) + ": no record with id '" + id + "'");
    }
    out.push_back({r, it->second});
  }
  if (by_id.size() != ref_ids.size()) {
    for (const auto & [id, c] : by_id) {
      if (!ref_ids.count(id)) {
        throw SchemaError(std::string(ref_name) + ": no record with id '" + id + "'");
      }
    }
  }
  return out;
}

MetaActionSequence parse_token_list(const std::string & text, const Taxonomy & tax)
{
  std::vector<std::string> tokens;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, ';')) {
    const auto b = cur.find_first_not_of(' ');
    const auto e = cur.find_last_not_of(' ');
    if (b != std::string::npos) {
      tokens.push_back(cur.substr(b, e - b + 1));
    }
  }
  if (tokens.empty()) {
    throw SchemaError("empty meta-action list");
  }
  return make_sequence(tokens, tax);
}

Json sequence_json(const MetaActionSequence & s)
{
  Json j = Json::array();
  for (const auto & a : s) {
    j.push_back(a.token);
  }
  return j;
}

Json report_header(const char * command)
{
  Json j;
  j["schema"] = "sup-report/1";
  j["command"] = command;
  return j;
}

// ---------------------------------------------------------------- eval-actions

struct ActionsArgs
{
  std::string triples;
  std::string refs;
  std::string cands;
  std::string ref;
  std::string cand;
  bool no_alternatives{false};
  bool clamp{false};
};

struct Triple
{
  std::string id;
  MetaActionSequence reference;
  std::optional<std::vector<MetaActionSequence>> alternatives;
  MetaActionSequence candidate;
};

MetaActionSequence sequence_from_json(const Json & v, const std::string & where, const Taxonomy & tax)
{
  if (!v.is_array() || v.empty()) {
    throw SchemaError(where + ": expected a non-empty array of tokens");
  }
  std::vector<std::string> tokens;
  for (const auto & t : v) {
    if (!t.is_string()) {
      throw SchemaError(where + ": tokens must be strings");
    }
    tokens.push_back(t.get<std::string>());
  }
  try {
    return make_sequence(tokens, tax);
  } catch (const SchemaError & e) {
    throw SchemaError(where + ": " + e.what());
  }
}

// One JSON object per line: {"id", "reference", "alternatives"?, "candidate"}.
std::vector<Triple> load_triples(const std::string & path, const Taxonomy & tax)
{
  const std::string text = io::read_file(path);
  std::vector<Triple> out;
  std::istringstream ss(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(ss, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::string where = "line " + std::to_string(n);
    Json doc;
    try {
      doc = io::parse_json(line);
    } catch (const SyntaxError & e) {
      throw SyntaxError(where + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string()) {
      throw SchemaError(where + ": id: expected a string");
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() != "id" && it.key() != "reference" && it.key() != "alternatives" &&
        it.key() != "candidate")
      {
        throw SchemaError(where + ": unknown field '" + it.key() + "'");
      }
    }
    Triple t;
    t.id = doc["id"].get<std::string>();
    t.reference = sequence_from_json(doc.value("reference", Json()), where + ": reference", tax);
    t.candidate = sequence_from_json(doc.value("candidate", Json()), where + ": candidate", tax);
    if (doc.contains("alternatives")) {
      const auto & alts = doc["alternatives"];
      if (!alts.is_array()) {
        throw SchemaError(where + ": alternatives: expected an array");
      }
      t.alternatives.emplace();
      for (std::size_t k = 0; k < alts.size(); ++k) {
        t.alternatives->push_back(sequence_from_json(alts[k],
          where + ": alternatives[" + std::to_string(k) + "]", tax));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

int eval_actions(const Context & ctx, const ActionsArgs & a)
{
  const auto & cfg = ctx.cfg;
  const auto references_for = [&](const MetaActionSequence & ref) {
      std::vector<MetaActionSequence> refs{ref};
      if (!a.no_alternatives) {
        auto alts = actions::generate_alternatives(ref, cfg.substitutions, cfg.alternatives_limit,
            cfg.taxonomy);
        refs.insert(refs.end(), alts.begin(), alts.end());
      }
      return refs;
    };

  if (!a.ref.empty() || !a.cand.empty()) {
    if (a.ref.empty() || a.cand.empty()) {
      throw SchemaError("--ref and --cand must be given together");
    }
    const auto ref = parse_token_list(a.ref, cfg.taxonomy);
    const auto cand = parse_token_list(a.cand, cfg.taxonomy);
    const auto refs = references_for(ref);
    auto best = actions::score_with_alternatives(refs, cand, cfg.weights, cfg.taxonomy);
    if (a.clamp) {
      best.normalized_score = actions::clamp_score(best.normalized_score);
    }
    const auto al = actions::align(refs[best.reference_index], cand, cfg.weights, cfg.taxonomy);
    Json j = report_header("eval-actions");
    j["alternatives"] = !a.no_alternatives;
    j["reference"] = sequence_json(ref);
    j["candidate"] = sequence_json(cand);
    j["score"] = best.normalized_score;
    j["raw_score"] = best.raw_score;
    j["best_reference"] = sequence_json(refs[best.reference_index]);
    Json path = Json::array();
    for (auto s : al.path()) {
      path.push_back(actions::to_string(s));
    }
    j["path"] = std::move(path);
    std::ostringstream t;
    t << "score " << f3(best.normalized_score) << " (raw " << f3(best.raw_score) << ")\n";
    t << "best reference:";
    for (const auto & x : refs[best.reference_index]) {
      t << " [" << x.token << "]";
    }
    t << "\n";
    ctx.emit(j, t.str());
    return kExitOk;
  }

  std::vector<Triple> items;
  if (!a.triples.empty()) {
    items = load_triples(a.triples, cfg.taxonomy);
  } else {
    if (a.refs.empty() || a.cands.empty()) {
      throw SchemaError("eval-actions needs --triples, --refs and --cands, or --ref and --cand");
    }
    const auto refs = load_corpus(a.refs, cfg);
    const auto cands = load_corpus(a.cands, cfg);
    for (const auto & p : pair_by_id(refs, cands, "refs", "cands")) {
      items.push_back({p.ref->id, p.ref->meta_actions, std::nullopt, p.cand->meta_actions});
    }
  }
  if (items.empty()) {
    throw SchemaError("empty corpus");
  }
  std::stable_sort(items.begin(), items.end(), [](const Triple & x, const Triple & y) {
      return x.id < y.id;
    });
  std::vector<actions::BestScore> scores(items.size());
  std::vector<std::size_t> n_refs(items.size());
  parallel_for(items.size(), cfg.jobs, [&](std::size_t i) {
      std::vector<MetaActionSequence> r;
      if (items[i].alternatives) {
        r.push_back(items[i].reference);
        r.insert(r.end(), items[i].alternatives->begin(), items[i].alternatives->end());
      } else {
        r = references_for(items[i].reference);
      }
      n_refs[i] = r.size();
      scores[i] = actions::score_with_alternatives(r, items[i].candidate, cfg.weights,
      cfg.taxonomy);
      if (a.clamp) {
        scores[i].normalized_score = actions::clamp_score(scores[i].normalized_score);
      }
    });
  const auto & pairs = items;
  std::vector<double> values;
  Json rows = Json::array();
  std::ostringstream t;
  t << pad("id", 16) << pad("score", 10) << pad("raw", 10) << "reference\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto & s = scores[i];
    values.push_back(s.normalized_score);
    rows.push_back({{"id", pairs[i].id}, {"score", s.normalized_score},
        {"raw_score", s.raw_score}, {"reference_index", s.reference_index},
        {"references", n_refs[i]}});
    t << pad(pairs[i].id, 16) << pad(f3(s.normalized_score), 10) <<
      pad(f3(s.raw_score), 10) << s.reference_index << "/" << n_refs[i] << "\n";
  }
  const double mean = metrics::stable_sum(values) / static_cast<double>(values.size());
  Json j = report_header("eval-actions");
  j["alternatives"] = !a.no_alternatives;
  j["clamped"] = a.clamp;
  j["records"] = std::move(rows);
  j["summary"] = {{"records", pairs.size()}, {"mean_score", mean}};
  t << "mean score " << f6(mean) << " over " << pairs.size() << " records\n";
  ctx.emit(j, t.str());
  return kExitOk;
}

// ----------------------------------------------------------- eval-description

struct DescriptionArgs
{
  std::string refs;
  std::string cands;
  std::string ref_text;
  std::string out_text;
  std::string judge;
  std::string judge_url;
  std::string judge_stub;
};

Json breakdown_json(const description::ScoreBreakdown & b)
{
  return {{"matched", b.n_matched}, {"partial", b.n_partial},
    {"hallucination", b.n_hallucination}, {"n_gt", b.n_gt}, {"score", b.score}};
}

int eval_description(const Context & ctx, const DescriptionArgs & a)
{
  const auto & cfg = ctx.cfg;
  std::vector<std::string> ids;
  std::vector<description::JudgeRequest> requests;
  if (!a.ref_text.empty() || !a.out_text.empty()) {
    if (a.ref_text.empty() || a.out_text.empty()) {
      throw SchemaError("--ref-text and --out-text must be given together");
    }
    ids.push_back("text");
    requests.push_back({io::read_file(a.ref_text), io::read_file(a.out_text)});
  } else {
    if (a.refs.empty() || a.cands.empty()) {
      throw SchemaError(
              "eval-description needs --refs and --cands (or --ref-text and --out-text)");
    }
    const auto refs = load_corpus(a.refs, cfg);
    const auto cands = load_corpus(a.cands, cfg);
    for (const auto & p : pair_by_id(refs, cands, "refs", "cands")) {
      ids.push_back(p.ref->id);
      requests.push_back({description::render_description(*p.ref),
          description::render_description(*p.cand)});
    }
  }
  if (requests.empty()) {
    throw SchemaError("empty corpus");
  }

  std::string url = a.judge_url.empty() ? cfg.judge.endpoint : a.judge_url;
  std::string stub = a.judge_stub.empty() ? cfg.judge.stub : a.judge_stub;
  std::string mode = a.judge;
  if (mode.empty()) {
    mode = !a.judge_stub.empty() ? "stub" : !a.judge_url.empty() ? "gateway" :
      !stub.empty() ? "stub" : !url.empty() ? "gateway" : "structured";
  }
  if (mode == "stub" && stub.empty()) {
    throw SchemaError("--judge stub needs --judge-stub or judge.stub in the config");
  }
  if (mode == "gateway" && url.empty()) {
    throw SchemaError("--judge gateway needs --judge-url or judge.endpoint in the config");
  }
  std::vector<description::JudgeOutcome> outcomes;
  std::string judge_name;
  if (mode == "stub") {
    auto judge = description::StubJudge::from_json(io::parse_json(io::read_file(stub)));
    outcomes = description::judge_all(judge, requests, cfg.judge.max_in_flight);
    judge_name = "stub";
  } else if (mode == "gateway") {
    description::HttpJudge judge(url, cfg.judge.timeout);
    outcomes = description::judge_all(judge, requests, cfg.judge.max_in_flight);
    judge_name = "gateway";
  } else {
    outcomes.resize(requests.size());
    parallel_for(requests.size(), cfg.jobs, [&](std::size_t i) {
        outcomes[i] = description::classify_matches(
          description::extract_key_info(requests[i].reference_description),
          description::extract_key_info(requests[i].output_description),
          description::DefaultMatcher{}, cfg.thresholds);
      });
    judge_name = "structured";
  }

  Json rows = Json::array();
  std::vector<double> values;
  std::size_t failures = 0;
  std::ostringstream t;
  t << "judge: " << judge_name << "\n";
  t << pad("id", 16) << pad("matched", 9) << pad("partial", 9) << pad("halluc", 9) <<
    pad("n_gt", 6) << "score\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (const auto * b = std::get_if<description::ScoreBreakdown>(&outcomes[i])) {
      values.push_back(b->score);
      Json r = {{"id", ids[i]}};
      r.update(breakdown_json(*b));
      rows.push_back(std::move(r));
      t << pad(ids[i], 16) << pad(std::to_string(b->n_matched), 9) <<
        pad(std::to_string(b->n_partial), 9) << pad(std::to_string(b->n_hallucination), 9) <<
        pad(std::to_string(b->n_gt), 6) << f3(b->score) << "\n";
    } else {
      ++failures;
      const auto & msg = std::get<std::string>(outcomes[i]);
      rows.push_back({{"id", ids[i]}, {"error", msg}});
      t << pad(ids[i], 16) << "error: " << msg << "\n";
    }
  }
  const double mean = values.empty() ? 0.0 :
    metrics::stable_sum(values) / static_cast<double>(values.size());
  Json j = report_header("eval-description");
  j["judge"] = judge_name;
  j["records"] = std::move(rows);
  j["summary"] = {{"records", outcomes.size()}, {"scored", values.size()},
    {"failed", failures}, {"mean_score", mean}};
  t << "mean score " << f6(mean) << " over " << values.size() << " scored records";
  if (failures) {
    t << ", " << failures << " failed";
  }
  t << "\n";
  ctx.emit(j, t.str());
  return failures ? kExitRuntime : kExitOk;
}

// -------------------------------------------------------------- match-objects

struct MatchArgs
{
  std::string corpus;
  std::string calib;
  double tau{-1.0};
};

int match_objects(Context ctx, const MatchArgs & a)
{
  if (a.corpus.empty() || a.calib.empty()) {
    throw SchemaError("match-objects needs --corpus and --calib");
  }
  auto & cfg = ctx.cfg;
  if (a.tau >= 0.0) {
    cfg.matching.tau = a.tau;
  }
  cfg.matching.validate();
  const auto records = load_corpus(a.corpus, cfg);
  const auto cams = io::parse_calibration(io::read_file(a.calib));
  std::vector<matching::MatchOutcome> outcomes(records.size());
  parallel_for(records.size(), cfg.jobs, [&](std::size_t i) {
      const auto & r = records[i];
      static const std::vector<Detection3D> none;
      outcomes[i] = matching::match_objects(r.critical_objects,
      r.detections ? *r.detections : none, cams, cfg.matching);
    });
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](auto x, auto y) {return records[x].id < records[y].id;});

  std::size_t n_crit = 0, n_matched = 0;
  Json rows = Json::array();
  std::ostringstream t;
  t << pad("id", 16) << pad("critical", 10) << pad("detection", 11) << pad("camera", 10) <<
    "aIoU\n";
  for (auto i : order) {
    const auto & r = records[i];
    const auto & o = outcomes[i];
    n_crit += r.critical_objects.size();
    n_matched += o.matched.size();
    Json m = Json::array();
    for (const auto & p : o.matched) {
      m.push_back({{"critical", p.critical}, {"detection", p.detection},
          {"camera", cams[p.camera].name}, {"a_iou", p.a_iou}});
      t << pad(r.id, 16) << pad(std::to_string(p.critical), 10) <<
        pad(std::to_string(p.detection), 11) << pad(cams[p.camera].name, 10) << f3(p.a_iou) <<
        "\n";
    }
    for (auto c : o.unmatched_critical) {
      t << pad(r.id, 16) << pad(std::to_string(c), 10) << pad("-", 11) << pad("-", 10) << "-\n";
    }
    rows.push_back({{"id", r.id}, {"matched", std::move(m)},
        {"unmatched_critical", o.unmatched_critical},
        {"unmatched_detections", o.unmatched_detections}});
  }
  Json j = report_header("match-objects");
  j["tau"] = cfg.matching.tau;
  j["records"] = std::move(rows);
  const double rate = n_crit ? static_cast<double>(n_matched) / static_cast<double>(n_crit) : 0.0;
  j["summary"] = {{"records", records.size()}, {"critical_objects", n_crit},
    {"matched", n_matched}, {"match_rate", rate}};
  t << "matched " << n_matched << " of " << n_crit << " critical objects (" << f3(rate) << ")\n";
  ctx.emit(j, t.str());
  return kExitOk;
}

// --------------------------------------------------------------------- refine

struct RefineArgs
{
  std::string corpus;
  int max_iters{0};
};

planning::PlannerInputs planner_inputs(const ScenarioRecord & r)
{
  planning::PlannerInputs in;
  in.w_slow = r.trajectory;
  in.ego = r.ego;
  if (r.detections) {
    in.obstacles = planning::predict_obstacles(*r.detections, r.trajectory.dt,
        r.trajectory.waypoints.size());
  }
  return in;
}

int refine(Context ctx, const RefineArgs & a)
{
  if (a.corpus.empty()) {
    throw SchemaError("refine needs --corpus");
  }
  auto & cfg = ctx.cfg;
  if (a.max_iters > 0) {
    cfg.planner.max_iters = a.max_iters;
  }
  const auto records = load_corpus(a.corpus, cfg);
  std::vector<planning::RefineResult> results(records.size());
  std::vector<double> before(records.size());
  std::vector<planning::PlannerInputs> inputs(records.size());
  parallel_for(records.size(), cfg.jobs, [&](std::size_t i) {
      inputs[i] = planner_inputs(records[i]);
      try {
        inputs[i].validate();
      } catch (const std::invalid_argument & e) {
        throw SchemaError("record '" + records[i].id + "': " + e.what());
      }
      results[i] = planning::refine_detailed(inputs[i], cfg.planner);
      before[i] = results[i].objective_history.front();
    });
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](auto x, auto y) {return records[x].id < records[y].id;});

  Json rows = Json::array();
  std::ostringstream t;
  t << pad("id", 16) << pad("J_slow", 12) << pad("J_fast", 12) << pad("iters", 7) <<
    pad("clear_slow", 12) << "clear_fast\n";
  for (auto i : order) {
    const auto & res = results[i];
    const double c0 = planning::min_clearance(inputs[i].w_slow, inputs[i].obstacles);
    const double c1 = planning::min_clearance(res.trajectory, inputs[i].obstacles);
    const auto clear_json = [](double c) {return std::isfinite(c) ? Json(c) : Json(nullptr);};
    const auto clear_txt = [](double c) {return std::isfinite(c) ? f3(c) : std::string("-");};
    rows.push_back({{"id", records[i].id}, {"objective_slow", before[i]},
        {"objective_fast", res.objective_history.back()}, {"iterations", res.iterations},
        {"converged", res.converged}, {"clearance_slow", clear_json(c0)},
        {"clearance_fast", clear_json(c1)}, {"w_fast", io::trajectory_to_json(res.trajectory)}});
    t << pad(records[i].id, 16) << pad(f3(before[i]), 12) <<
      pad(f3(res.objective_history.back()), 12) << pad(std::to_string(res.iterations), 7) <<
      pad(clear_txt(c0), 12) << clear_txt(c1) << "\n";
  }
  Json j = report_header("refine");
  j["records"] = std::move(rows);
  ctx.emit(j, t.str());
  return kExitOk;
}

// -------------------------------------------------------------- simulate-dual

struct DualArgs
{
  double latency_ms{410.0};
  double jitter_ms{0.0};
  double hz{10.0};
  double duration_s{10.0};
  double speed{10.0};
  bool no_slow{false};
  bool paths{false};
  std::string corpus;
};

int simulate_dual(const Context & ctx, const DualArgs & a)
{
  planning::DualLoopConfig dc;
  dc.fast_hz = a.hz;
  dc.duration_s = a.duration_s;
  dc.slow_enabled = !a.no_slow;
  dc.planner = ctx.cfg.planner;
  EgoState ego;
  ego.speed = a.speed;
  if (!a.corpus.empty()) {
    const auto records = load_corpus(a.corpus, ctx.cfg);
    if (records.empty()) {
      throw SchemaError("empty corpus");
    }
    const auto & r = records.front();
    ego = r.ego;
    ego.history.clear();
    if (r.detections) {
      dc.obstacles = *r.detections;
    }
  }
  const auto latency = a.jitter_ms > 0.0 ?
    planning::LatencyModel::jitter(a.latency_ms, a.jitter_ms, ctx.seed) :
    planning::LatencyModel::constant(a.latency_ms);
  const auto trace = planning::dual_loop(planning::cruise_source(a.speed, dc.dt, dc.steps),
      latency, dc, ego);

  std::ostringstream t;
  t << "fast " << f3(a.hz) << " Hz, " << f3(a.duration_s) << " s, slow latency " <<
    trace.latency << "\n";
  t << pad("tick", 6) << pad("t", 10) << pad("slow", 6) << pad("age", 10) << pad("ref", 5) <<
    pad("x", 10) << "y\n";
  for (const auto & r : trace.ticks) {
    t << pad(std::to_string(r.tick), 6) << pad(f3(r.time_us / 1e6), 10) <<
      pad(r.slow_seq ? std::to_string(*r.slow_seq) : "-", 6) <<
      pad(r.age_us ? f3(*r.age_us / 1e6) : "-", 10) << pad(r.no_reference ? "no" : "yes", 5) <<
      pad(f3(r.ego.x), 10) << f3(r.ego.y) << "\n";
  }
  const auto age = trace.max_age_us();
  t << "ticks " << trace.ticks.size() << ", slow results " << trace.slow.size() <<
    ", no-reference ticks " << trace.no_reference_ticks() << ", max age " <<
    (age ? f3(*age / 1e6) : std::string("-")) << " s\n";
  ctx.emit(planning::trace_to_json(trace, a.paths), t.str());
  return kExitOk;
}

// -------------------------------------------------------------------- metrics

struct MetricsArgs
{
  std::string pred;
  std::string gt;
  std::string mode{"both"};
};

int metrics_cmd(const Context & ctx, const MetricsArgs & a)
{
  if (a.pred.empty() || a.gt.empty()) {
    throw SchemaError("metrics needs --pred and --gt");
  }
  std::vector<metrics::DeMode> modes;
  if (a.mode == "both") {
    modes = {metrics::DeMode::at_horizon, metrics::DeMode::cumulative_mean};
  } else {
    try {
      modes = {metrics::parse_de_mode(a.mode)};
    } catch (const std::invalid_argument & e) {
      throw CLI::ValidationError("--mode", e.what());
    }
  }
  const auto gt = load_corpus(a.gt, ctx.cfg);
  const auto pred = load_corpus(a.pred, ctx.cfg);
  std::vector<metrics::MetricsSample> samples;
  for (const auto & p : pair_by_id(gt, pred, "gt", "pred")) {
    metrics::MetricsSample s;
    s.id = p.ref->id;
    s.gt = p.ref->trajectory;
    s.pred = p.cand->trajectory;
    s.initial_heading = p.ref->ego.heading;
    if (p.ref->detections) {
      s.agents = planning::predict_obstacles(*p.ref->detections, s.pred.dt,
          s.pred.waypoints.size());
    }
    samples.push_back(std::move(s));
  }
  Json reports = Json::array();
  std::string table;
  for (auto m : modes) {
    const auto r = metrics::evaluate(samples, ctx.cfg.horizons, m, ctx.cfg.ego, ctx.cfg.jobs);
    reports.push_back(metrics::report_to_json(r));
    table += (table.empty() ? "" : "\n") + metrics::render_table(r);
  }
  Json j = report_header("metrics");
  j["reports"] = std::move(reports);
  ctx.emit(j, table);
  return kExitOk;
}

// ------------------------------------------------------------- mine, keyframe

struct LogArgs
{
  std::string log;
  double from{-1.0};
  double to{-1.0};
  double offset{-1.0};
  double window{-1.0};
};

dataset::MiningConfig mining_config(const Context & ctx, const LogArgs & a)
{
  auto m = ctx.cfg.mining;
  if (a.offset >= 0.0) {
    m.keyframe_offset_s = a.offset;
  }
  if (a.window >= 0.0) {
    m.window_s = a.window;
  }
  try {
    m.validate();
  } catch (const std::invalid_argument & e) {
    throw CLI::ValidationError("mining", e.what());
  }
  return m;
}

Json keyframe_json(const dataset::Keyframe & k)
{
  return {{"keyframe", k.timestamp}, {"onset", k.onset ? Json(*k.onset) : Json(nullptr)},
    {"status", dataset::to_string(k.status)}};
}

std::string keyframe_text(const dataset::Keyframe & k)
{
  return pad(f3(k.timestamp), 10) + pad(k.onset ? f3(*k.onset) : std::string("-"), 10) +
         dataset::to_string(k.status);
}

int mine(const Context & ctx, const LogArgs & a, bool keyframes_only)
{
  if (a.log.empty()) {
    throw SchemaError("--log is required");
  }
  const auto cfg = mining_config(ctx, a);
  const auto log = dataset::parse_drive_log(io::read_file(a.log));
  std::vector<dataset::Interval> intervals;
  if (keyframes_only && (a.from >= 0.0 || a.to >= 0.0)) {
    if (a.from < 0.0 || a.to < a.from) {
      throw SchemaError("--from and --to must satisfy 0 <= from <= to");
    }
    dataset::Interval iv;
    bool found = false;
    for (std::size_t i = 0; i < log.samples.size(); ++i) {
      const double t = log.samples[i].t;
      if (t >= a.from - 1e-9 && t <= a.to + 1e-9) {
        if (!found) {
          iv.begin = i;
          iv.t_begin = t;
          found = true;
        }
        iv.end = i;
        iv.t_end = t;
      }
    }
    if (!found) {
      throw SchemaError("interval lies outside the drive log");
    }
    intervals.push_back(iv);
  } else {
    intervals = dataset::mine_challenging(log, cfg);
  }

  Json rows = Json::array();
  std::ostringstream t;
  t << pad("begin", 10) << pad("end", 10) << pad("keyframe", 10) << pad("onset", 10) << "status\n";
  for (const auto & iv : intervals) {
    const auto k = dataset::select_keyframe(log, iv, cfg);
    Json r = {{"begin", iv.t_begin}, {"end", iv.t_end}};
    r.update(keyframe_json(k));
    rows.push_back(std::move(r));
    t << pad(f3(iv.t_begin), 10) << pad(f3(iv.t_end), 10) << keyframe_text(k) << "\n";
  }
  Json j = report_header(keyframes_only ? "keyframe" : "mine");
  j["samples"] = log.samples.size();
  j["rate_hz"] = log.rate_hz();
  j["intervals"] = std::move(rows);
  t << intervals.size() << " interval(s)\n";
  ctx.emit(j, t.str());
  return kExitOk;
}

// ------------------------------------------------------------ validate, stats

struct CorpusArgs
{
  std::string corpus;
  double speed_tolerance{-1.0};
};

int validate_cmd(const Context & ctx, const CorpusArgs & a)
{
  if (a.corpus.empty()) {
    throw SchemaError("validate needs --corpus");
  }
  const auto lines = io::read_corpus_lines(io::read_file(a.corpus), ctx.cfg.taxonomy);
  dataset::ValidationOptions opt;
  opt.taxonomy = &ctx.cfg.taxonomy;
  opt.speed_tolerance = a.speed_tolerance >= 0.0 ? a.speed_tolerance : ctx.cfg.speed_tolerance;
  const auto report = dataset::validate_corpus(lines, opt);
  std::ostringstream t;
  for (const auto & f : report.failures) {
    for (const auto & i : f.issues) {
      t << "line " << f.line << (f.id.empty() ? "" : " (" + f.id + ")") << ": " << i.kind <<
        ": " << (i.field.empty() ? "" : i.field + ": ") << i.message << "\n";
    }
  }
  t << report.records << " records, " << report.failures.size() << " with issues, " <<
    report.issue_count() << " issues\n";
  Json j = report_header("validate");
  j.update(dataset::validation_to_json(report));
  ctx.emit(j, t.str());
  return report.clean() ? kExitOk : kExitInput;
}

int stats_cmd(const Context & ctx, const CorpusArgs & a)
{
  if (a.corpus.empty()) {
    throw SchemaError("stats needs --corpus");
  }
  const auto records = load_corpus(a.corpus, ctx.cfg);
  const auto st = dataset::corpus_stats(records);
  std::vector<std::string> ids;
  for (const auto & r : records) {
    ids.push_back(r.id);
  }
  const auto splits = dataset::count_splits(dataset::assign_splits(ids, ctx.cfg.split));
  Json j = report_header("stats");
  j.update(dataset::stats_to_json(st, splits));
  ctx.emit(j, dataset::render_stats(st, splits));
  return kExitOk;
}

// ---------------------------------------------------------------------- synth

struct SynthArgs
{
  std::string out_dir;
  std::size_t count{200};
};

int synth_cmd(const Context & ctx, const SynthArgs & a)
{
  if (a.out_dir.empty()) {
    throw SchemaError("synth needs --out-dir");
  }
  std::filesystem::create_directories(a.out_dir);
  const auto dir = std::filesystem::path(a.out_dir);
  const auto refs = synth::corpus(a.count, ctx.seed);
  const auto preds = synth::predictions(refs, ctx.seed);
  const std::vector<std::pair<std::string, std::string>> files{
    {"refs.sup", io::serialize_corpus(refs, ctx.cfg.taxonomy)},
    {"cands.sup", io::serialize_corpus(preds, ctx.cfg.taxonomy)},
    {"calib.json", io::serialize_calibration(synth::cameras())},
    {"brake.csv", dataset::serialize_drive_log(synth::brake_log())},
    {"swerve.csv", dataset::serialize_drive_log(synth::swerve_log(20.0, {4.0, 13.0}))},
  };
  Json list = Json::array();
  std::ostringstream t;
  for (const auto & [name, content] : files) {
    io::write_file((dir / name).string(), content);
    list.push_back({{"file", name}, {"bytes", content.size()}});
    t << pad(name, 12) << content.size() << " bytes\n";
  }
  Json j = report_header("synth");
  j["seed"] = ctx.seed;
  j["records"] = a.count;
  j["files"] = std::move(list);
  ctx.emit(j, t.str());
  return kExitOk;
}

}  // namespace

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Scene-understanding-for-planning evaluation toolkit", "sup"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config_path, "JSON configuration file");
  app.add_option("--format", common.format, "Report format")
  ->check(CLI::IsMember({"table", "machine"}));
  app.add_option("--out", common.out_path, "Write the report to this file");
  app.add_option("--seed", common.seed, "Seed for randomized data generation");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::Range(1u, 256u));

  ActionsArgs actions_args;
  auto * eval_actions_cmd = app.add_subcommand("eval-actions", "Score meta-action sequences");
  eval_actions_cmd->add_option("--triples", actions_args.triples,
    "Lines of {id, reference, alternatives, candidate}");
  eval_actions_cmd->add_option("--refs", actions_args.refs, "Reference corpus");
  eval_actions_cmd->add_option("--cands", actions_args.cands, "Candidate corpus, paired by id");
  eval_actions_cmd->add_option("--ref", actions_args.ref, "Reference tokens, ';'-separated");
  eval_actions_cmd->add_option("--cand", actions_args.cand, "Candidate tokens, ';'-separated");
  eval_actions_cmd->add_flag("--no-alternatives", actions_args.no_alternatives,
    "Score against the reference only");
  eval_actions_cmd->add_flag("--clamp", actions_args.clamp, "Limit reported scores to [0, 1]");

  DescriptionArgs desc_args;
  auto * eval_desc_cmd = app.add_subcommand("eval-description", "Score scene descriptions");
  eval_desc_cmd->add_option("--refs", desc_args.refs, "Reference corpus");
  eval_desc_cmd->add_option("--cands", desc_args.cands, "Candidate corpus, paired by id");
  eval_desc_cmd->add_option("--ref-text", desc_args.ref_text, "Reference description text file");
  eval_desc_cmd->add_option("--out-text", desc_args.out_text, "Output description text file");
  eval_desc_cmd->add_option("--judge", desc_args.judge, "structured, gateway or stub")
  ->check(CLI::IsMember({"structured", "gateway", "stub"}));
  eval_desc_cmd->add_option("--judge-url", desc_args.judge_url, "Judge endpoint URL");
  eval_desc_cmd->add_option("--judge-stub", desc_args.judge_stub, "Canned judge responses");

  MatchArgs match_args;
  auto * match_cmd = app.add_subcommand("match-objects", "Match critical objects to detections");
  match_cmd->add_option("--corpus", match_args.corpus, "Scenario corpus with detections");
  match_cmd->add_option("--calib", match_args.calib, "Camera calibration file");
  match_cmd->add_option("--tau", match_args.tau, "aIoU threshold")->check(CLI::Range(0.0, 1.0));

  RefineArgs refine_args;
  auto * refine_cmd = app.add_subcommand("refine", "Refine slow trajectories");
  refine_cmd->add_option("--corpus", refine_args.corpus, "Scenario corpus");
  refine_cmd->add_option("--max-iters", refine_args.max_iters, "Iteration cap")
  ->check(CLI::PositiveNumber);

  DualArgs dual_args;
  auto * dual_cmd = app.add_subcommand("simulate-dual", "Simulate the slow/fast loop");
  dual_cmd->add_option("--latency-ms", dual_args.latency_ms, "Slow-branch latency")
  ->check(CLI::NonNegativeNumber);
  dual_cmd->add_option("--jitter-ms", dual_args.jitter_ms, "Uniform latency jitter")
  ->check(CLI::NonNegativeNumber);
  dual_cmd->add_option("--hz", dual_args.hz, "Fast tick rate")->check(CLI::PositiveNumber);
  dual_cmd->add_option("--duration-s", dual_args.duration_s, "Simulated time")
  ->check(CLI::NonNegativeNumber);
  dual_cmd->add_option("--speed", dual_args.speed, "Cruise speed of the slow source, m/s")
  ->check(CLI::NonNegativeNumber);
  dual_cmd->add_flag("--no-slow", dual_args.no_slow, "Disable the slow branch");
  dual_cmd->add_flag("--paths", dual_args.paths, "Include fast trajectories in machine output");
  dual_cmd->add_option("--corpus", dual_args.corpus, "Take ego state and obstacles from record 1");

  MetricsArgs metrics_args;
  auto * metrics_sub = app.add_subcommand("metrics", "Displacement error and collision rate");
  metrics_sub->add_option("--pred", metrics_args.pred, "Predicted corpus");
  metrics_sub->add_option("--gt", metrics_args.gt, "Ground-truth corpus, paired by id");
  metrics_sub->add_option("--mode", metrics_args.mode, "at-horizon, cumulative-mean or both")
  ->check(CLI::IsMember({"at-horizon", "cumulative-mean", "both"}));

  LogArgs mine_args;
  auto * mine_sub = app.add_subcommand("mine", "Find challenging intervals in a drive log");
  mine_sub->add_option("--log", mine_args.log, "Drive log CSV");
  mine_sub->add_option("--window", mine_args.window, "Variance window, s");
  mine_sub->add_option("--offset", mine_args.offset, "Keyframe lead, s");

  LogArgs key_args;
  auto * key_sub = app.add_subcommand("keyframe", "Select keyframes");
  key_sub->add_option("--log", key_args.log, "Drive log CSV");
  key_sub->add_option("--from", key_args.from, "Interval start, s");
  key_sub->add_option("--to", key_args.to, "Interval end, s");
  key_sub->add_option("--window", key_args.window, "Variance window, s");
  key_sub->add_option("--offset", key_args.offset, "Keyframe lead, s");

  CorpusArgs validate_args;
  auto * validate_sub = app.add_subcommand("validate", "Check a corpus");
  validate_sub->add_option("--corpus", validate_args.corpus, "Scenario corpus");
  validate_sub->add_option("--speed-tolerance", validate_args.speed_tolerance,
    "First-segment speed tolerance, m/s");

  CorpusArgs stats_args;
  auto * stats_sub = app.add_subcommand("stats", "Meta-action statistics and split counts");
  stats_sub->add_option("--corpus", stats_args.corpus, "Scenario corpus");

  SynthArgs synth_args;
  auto * synth_sub = app.add_subcommand("synth", "Write a seeded synthetic dataset");
  synth_sub->add_option("--out-dir", synth_args.out_dir, "Output directory");
  synth_sub->add_option("--count", synth_args.count, "Records")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Context ctx;
    if (!common.config_path.empty()) {
      ctx.cfg = load_config(common.config_path);
    }
    if (common.jobs > 0) {
      ctx.cfg.jobs = common.jobs;
    }
    ctx.machine = common.format == "machine";
    ctx.out_path = common.out_path;
    ctx.seed = common.seed;
    ctx.out = &out;

    if (eval_actions_cmd->parsed()) {return eval_actions(ctx, actions_args);}
    if (eval_desc_cmd->parsed()) {return eval_description(ctx, desc_args);}
    if (match_cmd->parsed()) {return match_objects(ctx, match_args);}
    if (refine_cmd->parsed()) {return refine(ctx, refine_args);}
    if (dual_cmd->parsed()) {return simulate_dual(ctx, dual_args);}
    if (metrics_sub->parsed()) {return metrics_cmd(ctx, metrics_args);}
    if (mine_sub->parsed()) {return mine(ctx, mine_args, false);}
    if (key_sub->parsed()) {return mine(ctx, key_args, true);}
    if (validate_sub->parsed()) {return validate_cmd(ctx, validate_args);}
    if (stats_sub->parsed()) {return stats_cmd(ctx, stats_args);}
    if (synth_sub->parsed()) {return synth_cmd(ctx, synth_args);}
    err << app.help();
    return kExitUsage;
  } catch (const CLI::ValidationError & e) {
    err << "sup: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SyntaxError & e) {
    err << "sup: syntax error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SchemaError & e) {
    err << "sup: schema error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError & e) {
    err << "sup: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument & e) {
    err << "sup: invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const GatewayError & e) {
    err << "sup: gateway error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception & e) {
    err << "sup: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  std::vector<const char *> argv;
  argv.push_back("sup");
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sup::cli
