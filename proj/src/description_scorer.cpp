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

#include "sup/description_scorer.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <utility>

#include "sup/errors.hpp"

namespace sup::description
{

const char * to_string(KeyKind kind)
{
  return kind == KeyKind::environment ? "environment" : "critical_event";
}

std::string normalize_text(std::string_view text)
{
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      if (pending_space && !out.empty()) {
        out += ' ';
      }
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

KeyInfo make_key_info(KeyKind kind, std::optional<std::string> field, std::string_view content)
{
  if (kind == KeyKind::environment && (!field || field->empty())) {
    throw SchemaError("environment key information requires a field name");
  }
  KeyInfo k{kind, kind == KeyKind::environment ? std::move(field) : std::nullopt,
    normalize_text(content)};
  if (k.content.empty()) {
    throw SchemaError("key information content is empty");
  }
  return k;
}

namespace
{

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<std::string> environment_field(const std::string & key)
{
  static const std::vector<std::pair<std::string, std::string>> known{
    {"weather", "weather"}, {"weather condition", "weather"},
    {"time", "time"}, {"time of day", "time"},
    {"road", "road"}, {"road environment", "road"}, {"road condition", "road"},
    {"road type", "road"},
    {"lane", "lane"}, {"lanes", "lane"}, {"lane options", "lane"},
    {"lane conditions", "lane"}, {"ego lane position", "lane"}, {"lane position", "lane"},
  };
  for (const auto & [k, f] : known) {
    if (k == key) {
      return f;
    }
  }
  return std::nullopt;
}

bool is_event_key(const std::string & key)
{
  return key == "critical events" || key == "critical event" || key == "events" ||
         key == "scene summary" || key == "summary";
}

void add_events(std::string_view text, std::vector<KeyInfo> & out)
{
  for (const auto & s : split_sentences(text)) {
    if (!normalize_text(s).empty()) {
      out.push_back(make_key_info(KeyKind::critical_event, std::nullopt, s));
    }
  }
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      continue;
    }
    const bool boundary = i + 1 == text.size() ||
      std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (!boundary) {
      continue;
    }
    auto s = trim(text.substr(start, i + 1 - start));
    if (!s.empty()) {
      out.emplace_back(s);
    }
    start = i + 1;
  }
  auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) {
    out.emplace_back(tail);
  }
  return out;
}

std::vector<KeyInfo> extract_key_info(const ScenarioRecord & r)
{
  std::vector<KeyInfo> out;
  const std::pair<const char *, const std::string *> env[] = {
    {"weather", &r.environment.weather}, {"time", &r.environment.time},
    {"road", &r.environment.road}, {"lane", &r.environment.lane}};
  for (const auto & [name, value] : env) {
    if (!normalize_text(*value).empty()) {
      out.push_back(make_key_info(KeyKind::environment, std::string(name), *value));
    }
  }
  add_events(r.scene_summary, out);
  return out;
}

std::vector<KeyInfo> extract_key_info(std::string_view text)
{
  if (trim(text).empty()) {
    throw SchemaError("description is empty");
  }
  std::vector<KeyInfo> out;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    auto line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) {
      line_end = text.size();
    }
    std::string_view line = text.substr(line_start, line_end - line_start);
    std::size_t seg_start = 0;
    while (seg_start <= line.size()) {
      auto seg_end = line.find("||", seg_start);
      if (seg_end == std::string_view::npos) {
        seg_end = line.size();
      }
      const auto seg = trim(line.substr(seg_start, seg_end - seg_start));
      if (!seg.empty()) {
        const auto colon = seg.find(':');
        const std::string key =
          colon == std::string_view::npos ? std::string() : fold_label(seg.substr(0, colon));
        const auto value = colon == std::string_view::npos ? seg : trim(seg.substr(colon + 1));
        if (auto field = environment_field(key)) {
          if (!normalize_text(value).empty()) {
            out.push_back(make_key_info(KeyKind::environment, field, value));
          }
        } else if (is_event_key(key)) {
          add_events(value, out);
        } else {
          add_events(seg, out);
        }
      }
      seg_start = seg_end + 2;
    }
    line_start = line_end + 1;
  }
  return out;
}

std::string render_description(const ScenarioRecord & r)
{
  auto clause = [](std::string label, const std::string & value) {
      std::string s = std::move(label) + ": " + value;
      if (!s.empty() && s.back() != '.') {
        s += '.';
      }
      return s;
    };
  std::string out = clause("Weather", r.environment.weather) + " || " +
    clause("Time", r.environment.time) + " || " +
    clause("Road Environment", r.environment.road) + " || " +
    clause("Lane", r.environment.lane) + "\n";
  out += "Critical Events: " + r.scene_summary;
  return out;
}

double aggregate_score(
  std::size_t n_matched, std::size_t n_partial, std::size_t n_hallucination, std::size_t n_gt)
{
  if (n_gt == 0) {
    throw std::invalid_argument("n_gt must be >= 1");
  }
  return (1.0 * static_cast<double>(n_matched) + 0.5 * static_cast<double>(n_partial) -
         0.25 * static_cast<double>(n_hallucination)) / static_cast<double>(n_gt);
}

double token_jaccard(std::string_view a, std::string_view b)
{
  auto tokens = [](std::string_view s) {
      std::set<std::string> out;
      const std::string norm = normalize_text(s);
      std::size_t start = 0;
      while (start < norm.size()) {
        auto end = norm.find(' ', start);
        if (end == std::string::npos) {
          end = norm.size();
        }
        out.insert(norm.substr(start, end - start));
        start = end + 1;
      }
      return out;
    };
  const auto ta = tokens(a);
  const auto tb = tokens(b);
  if (ta.empty() && tb.empty()) {
    return 1.0;
  }
  std::size_t inter = 0;
  for (const auto & t : ta) {
    inter += tb.count(t);
  }
  return static_cast<double>(inter) / static_cast<double>(ta.size() + tb.size() - inter);
}

double DefaultMatcher::similarity(
  std::size_t, const KeyInfo & gt, std::size_t, const KeyInfo & out) const
{
  if (gt.kind != out.kind) {
    return 0.0;
  }
  if (gt.kind == KeyKind::environment) {
    if (gt.field_name != out.field_name) {
      return 0.0;
    }
    return gt.content == out.content ? 1.0 : 0.5;
  }
  return token_jaccard(gt.content, out.content);
}

ScoreBreakdown classify_matches(
  const std::vector<KeyInfo> & gt, const std::vector<KeyInfo> & out, const Matcher & matcher,
  const MatchThresholds & thresholds)
{
  if (gt.empty()) {
    throw std::invalid_argument("ground truth key information is empty");
  }
  std::vector<PairMatch> candidates;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double s = matcher.similarity(i, gt[i], j, out[j]);
      if (s >= thresholds.partial) {
        candidates.push_back({i, j, s, s >= thresholds.match ? MatchLabel::matched :
          MatchLabel::partial});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
    [](const PairMatch & a, const PairMatch & b) {return a.similarity > b.similarity;});

  ScoreBreakdown res;
  res.n_gt = gt.size();
  std::vector<bool> gt_used(gt.size(), false);
  std::vector<bool> out_used(out.size(), false);
  for (const auto & c : candidates) {
    if (gt_used[c.gt] || out_used[c.out]) {
      continue;
    }
    gt_used[c.gt] = true;
    out_used[c.out] = true;
    (c.label == MatchLabel::matched ? res.n_matched : res.n_partial)++;
    res.pairs.push_back(c);
  }
  res.n_hallucination = static_cast<std::size_t>(
    std::count(out_used.begin(), out_used.end(), false));
  res.score = aggregate_score(res.n_matched, res.n_partial, res.n_hallucination, res.n_gt);
  return res;
}

}  // namespace sup::description
