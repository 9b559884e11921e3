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

#include "sup/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "sup/errors.hpp"

namespace sup::io
{

namespace
{

std::string join(const std::string & path, const char * key)
{
  return path.empty() ? std::string(key) : path + "." + key;
}

std::string index(const std::string & path, std::size_t i)
{
  return path + "[" + std::to_string(i) + "]";
}

const Json & require(const Json & obj, const std::string & path, const char * key)
{
  if (!obj.is_object()) {
    throw SchemaError((path.empty() ? std::string("document") : path) + ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(join(path, key) + ": missing field");
  }
  return *it;
}

const Json * optional_field(const Json & obj, const char * key)
{
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    return nullptr;
  }
  return &*it;
}

double to_number(const Json & v, const std::string & path)
{
  if (!v.is_number()) {
    throw SchemaError(path + ": expected a number");
  }
  return v.get<double>();
}

std::string to_string(const Json & v, const std::string & path)
{
  if (!v.is_string()) {
    throw SchemaError(path + ": expected a string");
  }
  return v.get<std::string>();
}

const Json & to_array(const Json & v, const std::string & path)
{
  if (!v.is_array()) {
    throw SchemaError(path + ": expected an array");
  }
  return v;
}

double number_at(const Json & obj, const std::string & path, const char * key)
{
  return to_number(require(obj, path, key), join(path, key));
}

std::string string_at(const Json & obj, const std::string & path, const char * key)
{
  return to_string(require(obj, path, key), join(path, key));
}

std::optional<std::string> optional_string(
  const Json & obj, const std::string & path, const char * key)
{
  const Json * v = optional_field(obj, key);
  if (!v) {
    return std::nullopt;
  }
  return to_string(*v, join(path, key));
}

template<std::size_t N>
std::array<double, N> fixed_array(const Json & v, const std::string & path)
{
  const auto & arr = to_array(v, path);
  if (arr.size() != N) {
    throw SchemaError(path + ": expected " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = to_number(arr[i], index(path, i));
  }
  return out;
}

Vec2 point(const Json & v, const std::string & path)
{
  auto a = fixed_array<2>(v, path);
  return {a[0], a[1]};
}

Json point_json(Vec2 p) {return Json::array({p.x, p.y});}

// Headings a hair above pi (six-decimal rounding of pi) snap back to pi.
double heading_value(double h)
{
  if (!std::isfinite(h)) {
    return h;
  }
  if (std::abs(std::abs(h) - std::numbers::pi) <= 1e-6) {
    return std::numbers::pi;
  }
  return geometry::normalize_angle(h);
}

MetaAction action_from(const Json & v, const std::string & path, const ParseOptions & opt)
{
  const std::string token = to_string(v, path);
  auto canon = opt.taxonomy->canonical_token(token);
  if (!canon) {
    if (opt.lenient) {
      return MetaAction{token, false};
    }
    throw SchemaError(path + ": unknown meta-action token '" + token + "'");
  }
  return MetaAction{*canon, opt.taxonomy->is_conservative(*canon)};
}

std::string label_from(
  const Json & obj, const std::string & path, const char * key,
  std::optional<std::string> (Taxonomy::*canon)(std::string_view) const,
  const ParseOptions & opt)
{
  std::string value = string_at(obj, path, key);
  auto c = (opt.taxonomy->*canon)(value);
  if (c) {
    return *c;
  }
  if (!opt.lenient) {
    throw SchemaError(join(path, key) + ": label '" + value + "' is not in the configured set");
  }
  return value;
}

}  // namespace

Json parse_json(std::string_view text)
{
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error & e) {
    std::string what = e.what();
    auto pos = what.find("] ");
    throw SyntaxError(pos == std::string::npos ? what : what.substr(pos + 2));
  }
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string & path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

Json trajectory_to_json(const Trajectory & traj)
{
  Json wps = Json::array();
  for (const auto & w : traj.waypoints) {
    wps.push_back(point_json(w));
  }
  return Json{{"dt", traj.dt}, {"waypoints", wps}};
}

Trajectory trajectory_from_json(const Json & doc, const std::string & path)
{
  Trajectory t;
  t.dt = number_at(doc, path, "dt");
  const std::string wp = join(path, "waypoints");
  const auto & arr = to_array(require(doc, path, "waypoints"), wp);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    t.waypoints.push_back(point(arr[i], index(wp, i)));
  }
  return t;
}

ScenarioRecord scenario_from_json(const Json & doc, const ParseOptions & opt)
{
  const std::string root;
  const std::string schema = string_at(doc, root, "schema");
  if (schema != kScenarioSchema) {
    throw SchemaError("schema: unsupported version '" + schema + "', expected 'sup/1'");
  }

  ScenarioRecord r;
  r.id = string_at(doc, root, "id");

  if (const Json * frames = optional_field(doc, "frames")) {
    const auto & arr = to_array(*frames, "frames");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = index("frames", i);
      r.frames.push_back(
        {string_at(arr[i], p, "camera"), string_at(arr[i], p, "path"),
          number_at(arr[i], p, "timestamp")});
    }
  }

  const auto & env = require(doc, root, "environment");
  r.environment.weather = label_from(
    env, "environment", "weather", &Taxonomy::canonical_weather, opt);
  r.environment.time = label_from(env, "environment", "time", &Taxonomy::canonical_time, opt);
  r.environment.road = label_from(env, "environment", "road", &Taxonomy::canonical_road, opt);
  r.environment.lane = string_at(env, "environment", "lane");

  if (const Json * objs = optional_field(doc, "critical_objects")) {
    const auto & arr = to_array(*objs, "critical_objects");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = index("critical_objects", i);
      auto b = fixed_array<4>(require(arr[i], p, "box"), p + ".box");
      r.critical_objects.push_back(
        {string_at(arr[i], p, "category"), BBox2D{b[0], b[1], b[2], b[3]},
          optional_string(arr[i], p, "description")});
    }
  }

  if (const Json * an = optional_field(doc, "analyses")) {
    const auto & arr = to_array(*an, "analyses");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = index("analyses", i);
      const auto & obj = require(arr[i], p, "object");
      if (!obj.is_number_unsigned()) {
        throw SchemaError(p + ".object: expected a non-negative integer index");
      }
      ObjectAnalysis a;
      a.object = obj.get<std::size_t>();
      a.static_attributes = optional_string(arr[i], p, "static_attributes");
      a.motion_state = optional_string(arr[i], p, "motion_state");
      a.particular_behavior = optional_string(arr[i], p, "particular_behavior");
      a.influence = string_at(arr[i], p, "influence");
      r.analyses.push_back(std::move(a));
    }
  }

  if (const Json * s = optional_field(doc, "scene_summary")) {
    r.scene_summary = to_string(*s, "scene_summary");
  }

  const auto & actions = to_array(require(doc, root, "meta_actions"), "meta_actions");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    r.meta_actions.push_back(action_from(actions[i], index("meta_actions", i), opt));
  }

  const auto & dec = require(doc, root, "decision");
  r.decision.action = action_from(require(dec, "decision", "action"), "decision.action", opt);
  r.decision.subject = string_at(dec, "decision", "subject");
  r.decision.duration = string_at(dec, "decision", "duration");

  r.trajectory = trajectory_from_json(require(doc, root, "trajectory"));

  const auto & ego = require(doc, root, "ego");
  r.ego.position = point(require(ego, "ego", "position"), "ego.position");
  r.ego.heading = heading_value(number_at(ego, "ego", "heading"));
  r.ego.speed = number_at(ego, "ego", "speed");
  if (const Json * hist = optional_field(ego, "history")) {
    const auto & arr = to_array(*hist, "ego.history");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = index("ego.history", i);
      r.ego.history.push_back(
        {number_at(arr[i], p, "t"), point(require(arr[i], p, "position"), p + ".position"),
          heading_value(number_at(arr[i], p, "heading")), number_at(arr[i], p, "speed")});
    }
  }

  if (const Json * dets = optional_field(doc, "detections")) {
    const auto & arr = to_array(*dets, "detections");
    std::vector<Detection3D> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = index("detections", i);
      Detection3D d;
      d.category = string_at(arr[i], p, "category");
      d.center = fixed_array<3>(require(arr[i], p, "center"), p + ".center");
      d.size = fixed_array<3>(require(arr[i], p, "size"), p + ".size");
      d.yaw = number_at(arr[i], p, "yaw");
      if (const Json * hist = optional_field(arr[i], "history")) {
        const auto & harr = to_array(*hist, p + ".history");
        for (std::size_t k = 0; k < harr.size(); ++k) {
          const std::string hp = index(p + ".history", k);
          d.history.push_back(
            {number_at(harr[k], hp, "t"), point(require(harr[k], hp, "position"),
              hp + ".position")});
        }
      }
      out.push_back(std::move(d));
    }
    r.detections = std::move(out);
  }

  if (!opt.lenient) {
    throw_if_any(check_record(r, *opt.taxonomy));
  }
  return r;
}

ScenarioRecord parse_scenario(std::string_view document, const ParseOptions & options)
{
  return scenario_from_json(parse_json(document), options);
}

Json scenario_to_json(const ScenarioRecord & r)
{
  Json doc;
  doc["schema"] = std::string(kScenarioSchema);
  doc["id"] = r.id;

  Json frames = Json::array();
  for (const auto & f : r.frames) {
    frames.push_back(Json{{"camera", f.camera}, {"path", f.path}, {"timestamp", f.timestamp}});
  }
  doc["frames"] = frames;

  doc["environment"] = Json{
    {"weather", r.environment.weather}, {"time", r.environment.time},
    {"road", r.environment.road}, {"lane", r.environment.lane}};

  Json objs = Json::array();
  for (const auto & o : r.critical_objects) {
    Json j{{"category", o.category},
      {"box", Json::array({o.box.x1, o.box.y1, o.box.x2, o.box.y2})}};
    if (o.description) {
      j["description"] = *o.description;
    }
    objs.push_back(std::move(j));
  }
  doc["critical_objects"] = objs;

  Json analyses = Json::array();
  for (const auto & a : r.analyses) {
    Json j{{"object", a.object}};
    if (a.static_attributes) {
      j["static_attributes"] = *a.static_attributes;
    }
    if (a.motion_state) {
      j["motion_state"] = *a.motion_state;
    }
    if (a.particular_behavior) {
      j["particular_behavior"] = *a.particular_behavior;
    }
    j["influence"] = a.influence;
    analyses.push_back(std::move(j));
  }
  doc["analyses"] = analyses;
  doc["scene_summary"] = r.scene_summary;

  Json actions = Json::array();
  for (const auto & a : r.meta_actions) {
    actions.push_back(a.token);
  }
  doc["meta_actions"] = actions;
  doc["decision"] = Json{
    {"action", r.decision.action.token}, {"subject", r.decision.subject},
    {"duration", r.decision.duration}};
  doc["trajectory"] = trajectory_to_json(r.trajectory);

  Json ego{{"position", point_json(r.ego.position)}, {"heading", r.ego.heading},
    {"speed", r.ego.speed}};
  if (!r.ego.history.empty()) {
    Json hist = Json::array();
    for (const auto & h : r.ego.history) {
      hist.push_back(Json{{"t", h.t}, {"position", point_json(h.position)},
          {"heading", h.heading}, {"speed", h.speed}});
    }
    ego["history"] = hist;
  }
  doc["ego"] = ego;

  if (r.detections) {
    Json dets = Json::array();
    for (const auto & d : *r.detections) {
      Json j{{"category", d.category},
        {"center", Json::array({d.center[0], d.center[1], d.center[2]})},
        {"size", Json::array({d.size[0], d.size[1], d.size[2]})},
        {"yaw", d.yaw}};
      if (!d.history.empty()) {
        Json hist = Json::array();
        for (const auto & h : d.history) {
          hist.push_back(Json{{"t", h.t}, {"position", point_json(h.position)}});
        }
        j["history"] = hist;
      }
      dets.push_back(std::move(j));
    }
    doc["detections"] = dets;
  }
  return doc;
}

std::string serialize_scenario(const ScenarioRecord & record, bool compact, const Taxonomy & taxonomy)
{
  validate(record, taxonomy);
  return dump_canonical(scenario_to_json(record), compact ? -1 : 2) + "\n";
}

namespace
{

template<class Fn>
void for_each_line(std::string_view text, Fn && fn)
{
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      fn(line_no, line);
    }
    start = end + 1;
  }
}

}  // namespace

std::vector<ScenarioRecord> parse_corpus(std::string_view text, const ParseOptions & options)
{
  std::vector<ScenarioRecord> out;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
      try {
        out.push_back(parse_scenario(line, options));
      } catch (const SyntaxError & e) {
        throw SyntaxError("line " + std::to_string(n) + ": " + e.what());
      } catch (const SchemaError & e) {
        throw SchemaError("line " + std::to_string(n) + ": " + e.what());
      }
    });
  return out;
}

std::string serialize_corpus(const std::vector<ScenarioRecord> & records, const Taxonomy & taxonomy)
{
  std::string out;
  for (const auto & r : records) {
    out += serialize_scenario(r, true, taxonomy);
  }
  return out;
}

std::vector<CorpusLine> read_corpus_lines(std::string_view text, const Taxonomy & taxonomy)
{
  std::vector<CorpusLine> out;
  ParseOptions opt{&taxonomy, true};
  for_each_line(text, [&](std::size_t n, std::string_view line) {
      CorpusLine entry;
      entry.line = n;
      try {
        entry.record = parse_scenario(line, opt);
      } catch (const std::exception & e) {
        entry.error = e.what();
      }
      out.push_back(std::move(entry));
    });
  return out;
}

std::vector<CameraModel> parse_calibration(std::string_view document)
{
  const Json doc = parse_json(document);
  const std::string schema = string_at(doc, "", "schema");
  if (schema != kCalibrationSchema) {
    throw SchemaError("schema: unsupported version '" + schema + "', expected 'sup-calib/1'");
  }
  const auto & arr = to_array(require(doc, "", "cameras"), "cameras");
  std::vector<CameraModel> cams;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = index("cameras", i);
    const auto & c = arr[i];
    CameraModel cam;
    cam.name = string_at(c, p, "name");
    cam.fx = number_at(c, p, "fx");
    cam.fy = number_at(c, p, "fy");
    cam.cx = number_at(c, p, "cx");
    cam.cy = number_at(c, p, "cy");
    const auto & rot = to_array(require(c, p, "rotation"), p + ".rotation");
    if (rot.size() != 3) {
      throw SchemaError(p + ".rotation: expected 3 rows");
    }
    for (int row = 0; row < 3; ++row) {
      auto vals = fixed_array<3>(rot[row], index(p + ".rotation", row));
      for (int col = 0; col < 3; ++col) {
        cam.rotation(row, col) = vals[col];
      }
    }
    auto t = fixed_array<3>(require(c, p, "translation"), p + ".translation");
    cam.translation = Eigen::Vector3d(t[0], t[1], t[2]);
    const auto & w = require(c, p, "width");
    const auto & h = require(c, p, "height");
    if (!w.is_number_integer() || !h.is_number_integer()) {
      throw SchemaError(p + ": width and height must be integers");
    }
    cam.width = w.get<int>();
    cam.height = h.get<int>();
    throw_if_any(check_camera(cam, p));
    cams.push_back(std::move(cam));
  }
  return cams;
}

std::string serialize_calibration(const std::vector<CameraModel> & cameras)
{
  Json arr = Json::array();
  for (const auto & c : cameras) {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r) {
      rot.push_back(Json::array({c.rotation(r, 0), c.rotation(r, 1), c.rotation(r, 2)}));
    }
    arr.push_back(Json{{"name", c.name}, {"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx},
        {"cy", c.cy}, {"rotation", rot},
        {"translation", Json::array({c.translation.x(), c.translation.y(), c.translation.z()})},
        {"width", c.width}, {"height", c.height}});
  }
  // Full precision: the orthonormality check is tighter than six decimals.
  return Json{{"schema", std::string(kCalibrationSchema)}, {"cameras", arr}}.dump(2) + "\n";
}

}  // namespace sup::io
