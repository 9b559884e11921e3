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

#include "sup/dataset_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sup/errors.hpp"

namespace sup::dataset
{

namespace
{

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s, std::size_t line, std::string_view column)
{
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw SyntaxError(
      "line " + std::to_string(line) + ": column '" + std::string(column) + "': invalid number '" +
      std::string(s) + "'");
  }
  return v;
}

std::string fmt(double v)
{
  return io::format_fixed6(v);
}

}  // namespace

double DriveLog::rate_hz() const
{
  if (samples.size() < 2) {
    throw std::invalid_argument("drive log needs at least two samples");
  }
  return 1.0 / (samples[1].t - samples[0].t);
}

void DriveLog::validate() const
{
  if (samples.empty()) {
    throw std::invalid_argument("empty drive log");
  }
  for (const auto & s : samples) {
    if (!std::isfinite(s.t) || !std::isfinite(s.speed) || !std::isfinite(s.yaw_rate) ||
      !std::isfinite(s.steering) || !std::isfinite(s.accel))
    {
      throw std::invalid_argument("drive log contains non-finite values");
    }
  }
  if (samples.size() < 2) {
    return;
  }
  const double dt = samples[1].t - samples[0].t;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double d = samples[i].t - samples[i - 1].t;
    if (!(d > 0.0)) {
      throw std::invalid_argument(
        "drive log timestamps must strictly increase (sample " + std::to_string(i) + ")");
    }
    if (std::abs(d - dt) > 1e-6 * dt) {
      throw std::invalid_argument(
        "drive log rate is not uniform (sample " + std::to_string(i) + ")");
    }
  }
}

DriveLog parse_drive_log(std::string_view csv)
{
  static constexpr std::string_view kColumns[] = {"t", "speed", "yaw_rate", "steering", "accel"};
  DriveLog log;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto pos = csv.find('\n', start);
    if (pos == std::string_view::npos) {
      pos = csv.size();
    }
    const auto line = trim(csv.substr(start, pos - start));
    start = pos + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto cells = split_commas(line);
    if (!header) {
      bool ok = cells.size() == 5;
      for (std::size_t i = 0; ok && i < 5; ++i) {
        ok = cells[i] == kColumns[i];
      }
      if (!ok) {
        throw SchemaError("line " + std::to_string(line_no) +
                ": expected header t,speed,yaw_rate,steering,accel");
      }
      header = true;
      continue;
    }
    if (cells.size() != 5) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected 5 columns, got " +
              std::to_string(cells.size()));
    }
    DriveSample s;
    s.t = parse_number(cells[0], line_no, kColumns[0]);
    s.speed = parse_number(cells[1], line_no, kColumns[1]);
    s.yaw_rate = parse_number(cells[2], line_no, kColumns[2]);
    s.steering = parse_number(cells[3], line_no, kColumns[3]);
    s.accel = parse_number(cells[4], line_no, kColumns[4]);
    log.samples.push_back(s);
  }
  if (!header) {
    throw SchemaError("drive log has no header");
  }
  try {
    log.validate();
  } catch (const std::invalid_argument & e) {
    throw SchemaError(e.what());
  }
  return log;
}

std::string serialize_drive_log(const DriveLog & log)
{
  std::string out = "t,speed,yaw_rate,steering,accel\n";
  for (const auto & s : log.samples) {
    out += fmt(s.t) + "," + fmt(s.speed) + "," + fmt(s.yaw_rate) + "," + fmt(s.steering) + "," +
      fmt(s.accel) + "\n";
  }
  return out;
}

void MiningConfig::validate() const
{
  if (!(window_s > 0.0) || !std::isfinite(window_s)) {
    throw std::invalid_argument("mining window must be > 0");
  }
  if (!(speed_variance > 0.0 && yaw_rate_variance > 0.0 && accel_threshold > 0.0 &&
    yaw_rate_threshold > 0.0))
  {
    throw std::invalid_argument("mining thresholds must be > 0");
  }
  if (!(keyframe_offset_s >= 0.5 && keyframe_offset_s <= 1.0)) {
    throw std::invalid_argument("keyframe offset must lie in [0.5, 1.0] s");
  }
}

std::size_t window_samples(const DriveLog & log, const MiningConfig & cfg)
{
  const double n = std::round(cfg.window_s * log.rate_hz());
  return std::max<std::size_t>(2, static_cast<std::size_t>(n));
}

double variance(std::span<const double> v)
{
  if (v.empty()) {
    return 0.0;
  }
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) {
    s += (x - mean) * (x - mean);
  }
  return s / static_cast<double>(v.size());
}

std::vector<Interval> mine_challenging(const DriveLog & log, const MiningConfig & cfg)
{
  cfg.validate();
  log.validate();
  if (log.samples.size() < 2) {
    throw std::invalid_argument("drive log shorter than the mining window");
  }
  const std::size_t w = window_samples(log, cfg);
  const auto & s = log.samples;
  if (s.size() < w) {
    throw std::invalid_argument("drive log shorter than the mining window");
  }
  std::vector<double> speed(s.size()), yaw(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    speed[i] = s[i].speed;
    yaw[i] = s[i].yaw_rate;
  }
  std::vector<Interval> out;
  for (std::size_t end = w - 1; end < s.size(); ++end) {
    const std::size_t begin = end + 1 - w;
    const std::span<const double> sv(speed.data() + begin, w);
    const std::span<const double> yv(yaw.data() + begin, w);
    if (variance(sv) > cfg.speed_variance || variance(yv) > cfg.yaw_rate_variance) {
      if (!out.empty() && begin <= out.back().end) {
        out.back().end = end;
        out.back().t_end = s[end].t;
      } else {
        out.push_back({begin, end, s[begin].t, s[end].t});
      }
    }
  }
  return out;
}

std::string to_string(KeyframeStatus status)
{
  switch (status) {
    case KeyframeStatus::ok: return "ok";
    case KeyframeStatus::clamped: return "clamped";
    case KeyframeStatus::no_crossing: return "no_crossing";
  }
  return "ok";
}

Keyframe select_keyframe(const DriveLog & log, const Interval & iv, const MiningConfig & cfg)
{
  cfg.validate();
  if (log.samples.empty() || iv.begin > iv.end || iv.end >= log.samples.size()) {
    throw std::invalid_argument("interval outside the drive log");
  }
  const double t0 = log.samples.front().t;
  for (std::size_t i = iv.begin; i <= iv.end; ++i) {
    const auto & s = log.samples[i];
    if (std::abs(s.accel) > cfg.accel_threshold || std::abs(s.yaw_rate) > cfg.yaw_rate_threshold) {
      Keyframe k;
      k.onset = s.t;
      k.timestamp = s.t - cfg.keyframe_offset_s;
      if (k.timestamp < t0) {
        k.timestamp = t0;
        k.status = KeyframeStatus::clamped;
      }
      return k;
    }
  }
  return {log.samples[iv.begin].t, std::nullopt, KeyframeStatus::no_crossing};
}

std::size_t ValidationReport::issue_count() const
{
  std::size_t n = 0;
  for (const auto & f : failures) {
    n += f.issues.size();
  }
  return n;
}

std::vector<Issue> check_consistency(const ScenarioRecord & r, double tol)
{
  std::vector<Issue> out;
  const auto & w = r.trajectory.waypoints;
  if (w.size() >= 2 && r.trajectory.dt > 0.0) {
    const double v = geometry::norm(w[1] - w[0]) / r.trajectory.dt;
    if (std::isfinite(v) && std::abs(v - r.ego.speed) > tol) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
          "first segment implies %.3f m/s but ego speed is %.3f m/s (tolerance %.3f)", v,
          r.ego.speed, tol);
      out.push_back({"consistency", "trajectory.waypoints[1]", buf});
    }
  }
  return out;
}

namespace
{

void check_one(
  const ScenarioRecord & r, std::size_t line, const ValidationOptions & opt,
  ValidationReport & report)
{
  auto issues = check_record(r, *opt.taxonomy);
  auto more = check_consistency(r, opt.speed_tolerance);
  issues.insert(issues.end(), more.begin(), more.end());
  if (!issues.empty()) {
    report.failures.push_back({line, r.id, std::move(issues)});
  }
}

}  // namespace

ValidationReport validate_corpus(
  std::span<const ScenarioRecord> records, const ValidationOptions & opt)
{
  ValidationReport report;
  report.records = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    check_one(records[i], i + 1, opt, report);
  }
  return report;
}

ValidationReport validate_corpus(
  std::span<const io::CorpusLine> lines, const ValidationOptions & opt)
{
  ValidationReport report;
  report.records = lines.size();
  for (const auto & l : lines) {
    if (l.record) {
      check_one(*l.record, l.line, opt, report);
    } else {
      report.failures.push_back({l.line, "", {{"schema", "", l.error.value_or("unreadable")}}});
    }
  }
  return report;
}

Json validation_to_json(const ValidationReport & report)
{
  Json j;
  j["records"] = report.records;
  j["failing_records"] = report.failures.size();
  j["issues"] = report.issue_count();
  Json fails = Json::array();
  for (const auto & f : report.failures) {
    Json issues = Json::array();
    for (const auto & i : f.issues) {
      issues.push_back({{"kind", i.kind}, {"field", i.field}, {"message", i.message}});
    }
    fails.push_back({{"line", f.line}, {"id", f.id}, {"issues", std::move(issues)}});
  }
  j["failures"] = std::move(fails);
  return j;
}

CorpusStats corpus_stats(std::span<const ScenarioRecord> records)
{
  if (records.empty()) {
    throw std::invalid_argument("empty corpus");
  }
  CorpusStats st;
  st.records = records.size();
  std::vector<std::map<std::string, std::size_t>> counts(3);
  std::vector<std::size_t> totals(3, 0);
  for (const auto & r : records) {
    ++st.length_histogram[r.meta_actions.size()];
    for (std::size_t p = 0; p < 3 && p < r.meta_actions.size(); ++p) {
      ++counts[p][r.meta_actions[p].token];
      ++totals[p];
    }
  }
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<TokenShare> shares;
    for (const auto & [token, n] : counts[p]) {
      shares.push_back({token, n, static_cast<double>(n) / static_cast<double>(totals[p])});
    }
    std::stable_sort(shares.begin(), shares.end(), [](const TokenShare & a, const TokenShare & b) {
        return a.count > b.count;
      });
    st.positions.push_back(std::move(shares));
  }
  return st;
}

std::string to_string(Split split)
{
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

std::uint64_t fnv1a64(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<Split> assign_splits(std::span<const std::string> ids, SplitRatio ratio)
{
  if (!(ratio.train >= 0.0 && ratio.val >= 0.0 && ratio.test >= 0.0) ||
    !(ratio.train + ratio.val + ratio.test > 0.0))
  {
    throw std::invalid_argument("split ratio must be non-negative with a positive sum");
  }
  const std::size_t n = ids.size();
  const double total = ratio.train + ratio.val + ratio.test;
  const double share[3] = {ratio.train / total, ratio.val / total, ratio.test / total};
  std::size_t quota[3];
  double frac[3];
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double q = share[k] * static_cast<double>(n);
    // Guard against 749.9999... from the division.
    const double fl = std::floor(q + 1e-9);
    quota[k] = static_cast<std::size_t>(fl);
    frac[k] = q - fl;
    assigned += quota[k];
  }
  while (assigned < n) {
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (frac[k] > frac[best]) {
        best = k;
      }
    }
    ++quota[best];
    frac[best] = -1.0;
    ++assigned;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> hashes(n);
  for (std::size_t i = 0; i < n; ++i) {
    hashes[i] = fnv1a64(ids[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (hashes[a] != hashes[b]) {
        return hashes[a] < hashes[b];
      }
      return ids[a] < ids[b];
    });
  std::vector<Split> out(n, Split::train);
  for (std::size_t r = 0; r < n; ++r) {
    Split s = Split::test;
    if (r < quota[0]) {
      s = Split::train;
    } else if (r < quota[0] + quota[1]) {
      s = Split::val;
    }
    out[order[r]] = s;
  }
  return out;
}

SplitCounts count_splits(std::span<const Split> splits)
{
  SplitCounts c;
  for (auto s : splits) {
    switch (s) {
      case Split::train: ++c.train; break;
      case Split::val: ++c.val; break;
      case Split::test: ++c.test; break;
    }
  }
  return c;
}

Json stats_to_json(const CorpusStats & st, const SplitCounts & splits)
{
  Json j;
  j["records"] = st.records;
  Json pos = Json::array();
  for (std::size_t p = 0; p < st.positions.size(); ++p) {
    Json rows = Json::array();
    for (const auto & s : st.positions[p]) {
      rows.push_back({{"token", s.token}, {"count", s.count}, {"frequency", s.frequency}});
    }
    pos.push_back({{"position", p + 1}, {"tokens", std::move(rows)}});
  }
  j["positions"] = std::move(pos);
  Json hist = Json::array();
  for (const auto & [len, n] : st.length_histogram) {
    hist.push_back({{"length", len}, {"count", n}});
  }
  j["length_histogram"] = std::move(hist);
  j["splits"] = {{"train", splits.train}, {"val", splits.val}, {"test", splits.test}};
  return j;
}

std::string render_stats(const CorpusStats & st, const SplitCounts & splits)
{
  std::ostringstream os;
  char buf[128];
  os << "records: " << st.records << "\n";
  for (std::size_t p = 0; p < st.positions.size(); ++p) {
    os << "position " << p + 1 << ":\n";
    for (const auto & s : st.positions[p]) {
      std::snprintf(buf, sizeof(buf), "  %-34s %6zu %8.4f\n", s.token.c_str(), s.count,
          s.frequency);
      os << buf;
    }
  }
  os << "sequence length:\n";
  for (const auto & [len, n] : st.length_histogram) {
    std::snprintf(buf, sizeof(buf), "  %3zu %6zu\n", len, n);
    os << buf;
  }
  os << "split train/val/test: " << splits.train << "/" << splits.val << "/" << splits.test << "\n";
  return os.str();
}

}  // namespace sup::dataset
