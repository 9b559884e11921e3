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

#ifndef SUP__DESCRIPTION_SCORER_HPP_
#define SUP__DESCRIPTION_SCORER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sup/scenario.hpp"

namespace sup::description
{

enum class KeyKind { environment, critical_event };

const char * to_string(KeyKind kind);

/// One discrete piece of information extracted from a description.
/// Environment items carry a field name (weather, time, road, lane).
struct KeyInfo
{
  KeyKind kind{KeyKind::critical_event};
  std::optional<std::string> field_name;
  std::string content;

  friend bool operator==(const KeyInfo &, const KeyInfo &) = default;
};

/// Lower-case, punctuation stripped, whitespace collapsed.
std::string normalize_text(std::string_view text);

/// Builds a KeyInfo with normalized content; throws SchemaError if an
/// environment item lacks a field name or the content normalizes to nothing.
KeyInfo make_key_info(KeyKind kind, std::optional<std::string> field, std::string_view content);

/// Splits on '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view text);

/// One item per environment field plus one per sentence of the scene summary.
std::vector<KeyInfo> extract_key_info(const ScenarioRecord & record);

/// Parses "Key: value. || Key: value." segments (one or more per line).
/// Known keys map to environment fields; "Critical Events:" and unlabeled
/// text contribute one event per sentence. Throws SchemaError on empty text.
std::vector<KeyInfo> extract_key_info(std::string_view text);

/// Text form of a record's description, readable by extract_key_info(text).
std::string render_description(const ScenarioRecord & record);

/// (1.0 * matched + 0.5 * partial - 0.25 * hallucination) / n_gt.
/// Throws std::invalid_argument when n_gt == 0.
double aggregate_score(
  std::size_t n_matched, std::size_t n_partial, std::size_t n_hallucination, std::size_t n_gt);

enum class MatchLabel { matched, partial };

struct PairMatch
{
  std::size_t gt{0};
  std::size_t out{0};
  double similarity{0.0};
  MatchLabel label{MatchLabel::matched};
};

struct ScoreBreakdown
{
  std::size_t n_matched{0};
  std::size_t n_partial{0};
  std::size_t n_hallucination{0};
  std::size_t n_gt{0};
  double score{0.0};
  std::vector<PairMatch> pairs;
};

struct MatchThresholds
{
  double match{0.6};
  double partial{0.3};
};

/// Similarity in [0, 1] between a ground-truth item and an output item.
class Matcher
{
public:
  virtual ~Matcher() = default;
  virtual double similarity(
    std::size_t gt_index, const KeyInfo & gt, std::size_t out_index,
    const KeyInfo & out) const = 0;
};

/// Environment: 1.0 on equal content, 0.5 for the same field with another
/// value, 0 across fields. Events: token-set Jaccard. Environment vs. event: 0.
class DefaultMatcher : public Matcher
{
public:
  double similarity(
    std::size_t gt_index, const KeyInfo & gt, std::size_t out_index,
    const KeyInfo & out) const override;
};

double token_jaccard(std::string_view a, std::string_view b);

/// Greedy one-to-one pairing by descending similarity (ties: lower gt index,
/// then lower output index). Pairs >= thresholds.match are matched, pairs
/// >= thresholds.partial are partial; unpaired output items are hallucinations.
ScoreBreakdown classify_matches(
  const std::vector<KeyInfo> & gt, const std::vector<KeyInfo> & out,
  const Matcher & matcher = DefaultMatcher{}, const MatchThresholds & thresholds = {});

}  // namespace sup::description

#endif  // SUP__DESCRIPTION_SCORER_HPP_
