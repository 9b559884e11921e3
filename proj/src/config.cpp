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

#include "sup/config.hpp"

#include <filesystem>
#include <set>
#include <stdexcept>

#include "sup/errors.hpp"
#include "sup/scenario_io.hpp"

namespace sup
{

namespace
{

namespace fs = std::filesystem;
using io::Json;

class Section
{
public:
  Section(const Json & doc, std::string path) : doc_(doc), path_(std::move(path))
  {
    if (!doc_.is_object()) {
      throw SchemaError(where() + "expected an object");
    }
  }

  ~Section() = default;

  template<class T>
  void get(const char * key, T & out)
  {
    seen_.insert(key);
    if (!doc_.contains(key)) {
      return;
    }
    try {
      out = doc_.at(key).get<T>();
    } catch (const Json::exception &) {
      throw SchemaError(where() + key + ": wrong type");
    }
  }

  bool has(const char * key)
  {
    seen_.insert(key);
    return doc_.contains(key);
  }

  const Json & at(const char * key) const {return doc_.at(key);}

  void finish() const
  {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw SchemaError(where() + "unknown key '" + it.key() + "'");
      }
    }
  }

  std::string where() const {return path_.empty() ? "config: " : "config: " + path_ + ".";}

private:
  const Json & doc_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string resolve(const std::string & base, const std::string & p, const std::string & key)
{
  fs::path path(p);
  if (path.is_relative()) {
    path = fs::path(base) / path;
  }
  if (!fs::exists(path)) {
    throw SchemaError("config: " + key + ": file '" + p + "' does not exist");
  }
  return path.string();
}

template<class Fn>
void checked(const char * what, Fn && fn)
{
  try {
    fn();
  } catch (const std::invalid_argument & e) {
    throw SchemaError(std::string("config: ") + what + ": " + e.what());
  }
}

}  // namespace

void ToolConfig::validate() const
{
  checked("weights", [&] {weights.validate();});
  checked("matching", [&] {matching.validate();});
  checked("planner", [&] {planner.validate();});
  checked("mining", [&] {mining.validate();});
  if (!(thresholds.match >= thresholds.partial && thresholds.partial > 0.0 &&
    thresholds.match <= 1.0))
  {
    throw SchemaError("config: description: need 0 < partial <= match <= 1");
  }
  if (alternatives_limit < 1) {
    throw SchemaError("config: alternatives_limit must be >= 1");
  }
  if (!(split.train >= 0.0 && split.val >= 0.0 && split.test >= 0.0 &&
    split.train + split.val + split.test > 0.0))
  {
    throw SchemaError("config: split: ratios must be >= 0 with a positive sum");
  }
  if (!(speed_tolerance >= 0.0)) {
    throw SchemaError("config: speed_tolerance must be >= 0");
  }
  if (!(ego.length > 0.0 && ego.width > 0.0)) {
    throw SchemaError("config: ego: dimensions must be > 0");
  }
  if (horizons.empty()) {
    throw SchemaError("config: horizons must not be empty");
  }
  for (double h : horizons) {
    if (!(h > 0.0)) {
      throw SchemaError("config: horizons must be > 0");
    }
  }
  if (jobs < 1) {
    throw SchemaError("config: jobs must be >= 1");
  }
  if (judge.max_in_flight < 1 || judge.timeout.count() <= 0) {
    throw SchemaError("config: judge: max_in_flight and timeout_ms must be > 0");
  }
}

ToolConfig config_from_json(const Json & doc, const std::string & base)
{
  ToolConfig c;
  Section root(doc, "");

  if (root.has("vocabulary")) {
    const Json & v = root.at("vocabulary");
    if (v.is_string()) {
      c.taxonomy = Taxonomy::from_json(
        io::parse_json(io::read_file(resolve(base, v.get<std::string>(), "vocabulary"))));
    } else if (v.is_object()) {
      c.taxonomy = Taxonomy::from_json(v);
    } else {
      throw SchemaError("config: vocabulary: expected a file name or an object");
    }
  }
  if (root.has("conservative")) {
    std::vector<std::string> cons;
    root.get("conservative", cons);
    c.taxonomy = Taxonomy(c.taxonomy.meta_actions(), cons, c.taxonomy.weather_labels(),
        c.taxonomy.time_labels(), c.taxonomy.road_labels());
  }
  if (root.has("weights")) {
    Section s(root.at("weights"), "weights");
    s.get("s_matching", c.weights.s_matching);
    s.get("p_missing", c.weights.p_missing);
    s.get("p_redundant", c.weights.p_redundant);
    s.get("p_missing_conservative", c.weights.p_missing_conservative);
    s.get("p_redundant_conservative", c.weights.p_redundant_conservative);
    s.finish();
  }
  if (root.has("substitutions")) {
    const Json & v = root.at("substitutions");
    if (v.is_string()) {
      c.substitutions = actions::substitutions_from_json(
        io::parse_json(io::read_file(resolve(base, v.get<std::string>(), "substitutions"))),
        c.taxonomy);
    } else {
      c.substitutions = actions::substitutions_from_json(v, c.taxonomy);
    }
  }
  root.get("alternatives_limit", c.alternatives_limit);
  if (root.has("description")) {
    Section s(root.at("description"), "description");
    s.get("match", c.thresholds.match);
    s.get("partial", c.thresholds.partial);
    s.finish();
  }
  if (root.has("matching")) {
    Section s(root.at("matching"), "matching");
    s.get("tau", c.matching.tau);
    s.get("require_category_equality", c.matching.require_category_equality);
    s.finish();
  }
  if (root.has("planner")) {
    Section s(root.at("planner"), "planner");
    auto & p = c.planner;
    s.get("w_ref", p.w_ref);
    s.get("w_smooth", p.w_smooth);
    s.get("w_obs", p.w_obs);
    s.get("clearance", p.clearance);
    s.get("max_iters", p.max_iters);
    s.get("initial_step", p.initial_step);
    s.get("armijo_c", p.armijo_c);
    s.get("shrink", p.shrink);
    s.get("min_step", p.min_step);
    s.get("tolerance", p.tolerance);
    s.finish();
  }
  if (root.has("mining")) {
    Section s(root.at("mining"), "mining");
    auto & m = c.mining;
    s.get("window_s", m.window_s);
    s.get("speed_variance", m.speed_variance);
    s.get("yaw_rate_variance", m.yaw_rate_variance);
    s.get("accel_threshold", m.accel_threshold);
    s.get("yaw_rate_threshold", m.yaw_rate_threshold);
    s.get("keyframe_offset_s", m.keyframe_offset_s);
    s.finish();
  }
  if (root.has("split")) {
    Section s(root.at("split"), "split");
    s.get("train", c.split.train);
    s.get("val", c.split.val);
    s.get("test", c.split.test);
    s.finish();
  }
  root.get("speed_tolerance", c.speed_tolerance);
  if (root.has("ego")) {
    Section s(root.at("ego"), "ego");
    s.get("length", c.ego.length);
    s.get("width", c.ego.width);
    s.finish();
  }
  root.get("horizons", c.horizons);
  if (root.has("judge")) {
    Section s(root.at("judge"), "judge");
    s.get("endpoint", c.judge.endpoint);
    if (s.has("stub")) {
      std::string p;
      s.get("stub", p);
      if (!p.empty()) {
        c.judge.stub = resolve(base, p, "judge.stub");
      }
    }
    long long ms = c.judge.timeout.count();
    s.get("timeout_ms", ms);
    c.judge.timeout = std::chrono::milliseconds(ms);
    s.get("max_in_flight", c.judge.max_in_flight);
    s.finish();
  }
  root.get("jobs", c.jobs);
  root.finish();
  c.validate();
  return c;
}

ToolConfig load_config(const std::string & path)
{
  if (!fs::exists(path)) {
    throw SchemaError("config file '" + path + "' does not exist");
  }
  const auto base = fs::path(path).parent_path();
  return config_from_json(io::parse_json(io::read_file(path)),
           base.empty() ? std::string(".") : base.string());
}

Json config_to_json(const ToolConfig & c)
{
  Json j;
  j["vocabulary"] = c.taxonomy.to_json();
  j["weights"] = {
    {"s_matching", c.weights.s_matching},
    {"p_missing", c.weights.p_missing},
    {"p_redundant", c.weights.p_redundant},
    {"p_missing_conservative", c.weights.p_missing_conservative},
    {"p_redundant_conservative", c.weights.p_redundant_conservative},
  };
  Json subs = Json::object();
  for (const auto & [k, v] : c.substitutions) {
    subs[k] = v;
  }
  j["substitutions"] = std::move(subs);
  j["alternatives_limit"] = c.alternatives_limit;
  j["description"] = {{"match", c.thresholds.match}, {"partial", c.thresholds.partial}};
  j["matching"] = {{"tau", c.matching.tau},
    {"require_category_equality", c.matching.require_category_equality}};
  const auto & p = c.planner;
  j["planner"] = {{"w_ref", p.w_ref}, {"w_smooth", p.w_smooth}, {"w_obs", p.w_obs},
    {"clearance", p.clearance}, {"max_iters", p.max_iters}, {"initial_step", p.initial_step},
    {"armijo_c", p.armijo_c}, {"shrink", p.shrink}, {"min_step", p.min_step},
    {"tolerance", p.tolerance}};
  const auto & m = c.mining;
  j["mining"] = {{"window_s", m.window_s}, {"speed_variance", m.speed_variance},
    {"yaw_rate_variance", m.yaw_rate_variance}, {"accel_threshold", m.accel_threshold},
    {"yaw_rate_threshold", m.yaw_rate_threshold}, {"keyframe_offset_s", m.keyframe_offset_s}};
  j["split"] = {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}};
  j["speed_tolerance"] = c.speed_tolerance;
  j["ego"] = {{"length", c.ego.length}, {"width", c.ego.width}};
  j["horizons"] = c.horizons;
  j["judge"] = {{"endpoint", c.judge.endpoint}, {"stub", c.judge.stub},
    {"timeout_ms", c.judge.timeout.count()}, {"max_in_flight", c.judge.max_in_flight}};
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace sup
