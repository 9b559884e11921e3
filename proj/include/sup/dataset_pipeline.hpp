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

#ifndef SUP__DATASET_PIPELINE_HPP_
#define SUP__DATASET_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sup/canonical_json.hpp"
#include "sup/scenario.hpp"
#include "sup/scenario_io.hpp"

namespace sup::dataset
{

using io::Json;

struct DriveSample
{
  double t{0.0};
  double speed{0.0};
  double yaw_rate{0.0};
  double steering{0.0};
  double accel{0.0};
};

/// Fixed-rate vehicle log. File form is CSV with the header
/// `t,speed,yaw_rate,steering,accel`: seconds, m/s, rad/s, normalized
/// steering command, m/s^2.
struct DriveLog
{
  std::vector<DriveSample> samples;

  /// Samples per second, from the first interval.
  double rate_hz() const;
  /// Throws std::invalid_argument unless timestamps strictly increase at a
  /// uniform rate (1e-6 relative) and every value is finite.
  void validate() const;
};

DriveLog parse_drive_log(std::string_view csv);
std::string serialize_drive_log(const DriveLog & log);

struct MiningConfig
{
  double window_s{2.0};
  double speed_variance{1.0};
  double yaw_rate_variance{0.01};
  double accel_threshold{2.0};
  double yaw_rate_threshold{0.2};
  double keyframe_offset_s{0.75};

  /// window > 0, thresholds > 0, offset in [0.5, 1.0].
  void validate() const;
};

struct Interval
{
  std::size_t begin{0};
  /// Inclusive.
  std::size_t end{0};
  double t_begin{0.0};
  double t_end{0.0};

  friend bool operator==(const Interval &, const Interval &) = default;
};

/// Samples per variance window (at least 2).
std::size_t window_samples(const DriveLog & log, const MiningConfig & config);

/// Population variance of `values`.
double variance(std::span<const double> values);

/// Trailing windows whose speed or yaw-rate variance exceeds its threshold,
/// merged into intervals when they overlap.
std::vector<Interval> mine_challenging(const DriveLog & log, const MiningConfig & config);

enum class KeyframeStatus
{
  ok,
  clamped,
  no_crossing,
};

std::string to_string(KeyframeStatus status);

struct Keyframe
{
  double timestamp{0.0};
  std::optional<double> onset;
  KeyframeStatus status{KeyframeStatus::ok};
};

/// Onset is the first sample in the interval with |accel| or |yaw rate| above
/// threshold; keyframe = onset - offset, clamped to the log start. Without a
/// crossing the interval start is returned with status no_crossing.
Keyframe select_keyframe(const DriveLog & log, const Interval & interval, const MiningConfig & config);

struct RecordDiagnostics
{
  std::size_t line{0};
  std::string id;
  std::vector<Issue> issues;
};

struct ValidationReport
{
  std::size_t records{0};
  std::vector<RecordDiagnostics> failures;

  bool clean() const {return failures.empty();}
  std::size_t issue_count() const;
};

struct ValidationOptions
{
  const Taxonomy * taxonomy{&Taxonomy::defaults()};
  /// Allowed gap between first-segment speed and ego speed, m/s.
  double speed_tolerance{2.0};
};

/// Issues of one record, invariant checks plus first-segment speed consistency.
std::vector<Issue> check_consistency(const ScenarioRecord & record, double speed_tolerance);

ValidationReport validate_corpus(
  std::span<const ScenarioRecord> records, const ValidationOptions & options = {});
/// As above over leniently read lines; unreadable lines become schema issues.
ValidationReport validate_corpus(
  std::span<const io::CorpusLine> lines, const ValidationOptions & options = {});

Json validation_to_json(const ValidationReport & report);

struct TokenShare
{
  std::string token;
  std::size_t count{0};
  double frequency{0.0};
};

struct CorpusStats
{
  std::size_t records{0};
  /// Positions 1..3; sorted by count descending, then token.
  std::vector<std::vector<TokenShare>> positions;
  std::map<std::size_t, std::size_t> length_histogram;
};

CorpusStats corpus_stats(std::span<const ScenarioRecord> records);

enum class Split
{
  train,
  val,
  test,
};

std::string to_string(Split split);

struct SplitRatio
{
  double train{7.5};
  double val{1.0};
  double test{1.5};
};

struct SplitCounts
{
  std::size_t train{0};
  std::size_t val{0};
  std::size_t test{0};
};

std::uint64_t fnv1a64(std::string_view text);

/// Records sorted by (hash of id, id) are assigned to splits with exact counts
/// from largest-remainder rounding of the ratio. Result aligns with `ids`.
std::vector<Split> assign_splits(std::span<const std::string> ids, SplitRatio ratio = {});
SplitCounts count_splits(std::span<const Split> splits);

Json stats_to_json(const CorpusStats & stats, const SplitCounts & splits);
std::string render_stats(const CorpusStats & stats, const SplitCounts & splits);

struct SearchHit
{
  std::string frame;
  double score{0.0};
};

/// Text-to-frame retrieval used to surface long-tail objects. No
/// implementation ships here; it needs an external vision-language model.
class EmbeddingSearch
{
public:
  virtual ~EmbeddingSearch() = default;
  virtual std::vector<SearchHit> query(std::string_view text, std::size_t k) const = 0;
};

}  // namespace sup::dataset

#endif  // SUP__DATASET_PIPELINE_HPP_
