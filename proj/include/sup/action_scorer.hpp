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

#ifndef SUP__ACTION_SCORER_HPP_
#define SUP__ACTION_SCORER_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sup/scenario.hpp"

namespace sup::actions
{

struct ScoreWeights
{
  double s_matching{1.0};
  double p_missing{1.0};
  double p_redundant{1.0};
  double p_missing_conservative{0.5};
  double p_redundant_conservative{0.5};

  /// Throws std::invalid_argument unless s_matching > 0 and penalties >= 0.
  void validate() const;

  double missing_penalty(const MetaAction & a) const
  {
    return a.conservative ? p_missing_conservative : p_missing;
  }
  double redundant_penalty(const MetaAction & a) const
  {
    return a.conservative ? p_redundant_conservative : p_redundant;
  }
};

enum class Step : std::uint8_t { none, missing, redundant, matching };

const char * to_string(Step step);

/// Full dynamic-programming state. Row r, column c holds the best score of
/// aligning the first r reference actions with the first c candidate actions.
struct AlignmentResult
{
  std::size_t rows{0};
  std::size_t cols{0};
  struct Cell
  {
    double score{0.0};
    Step step{Step::none};
  };
  /// Row-major, rows * cols.
  std::vector<Cell> cells;
  double raw_score{0.0};
  double normalized_score{0.0};

  double at(std::size_t r, std::size_t c) const {return cells[r * cols + c].score;}
  Step step_at(std::size_t r, std::size_t c) const {return cells[r * cols + c].step;}

  /// Steps from (0, 0) to (rows-1, cols-1) recovered from the backtrace.
  std::vector<Step> path() const;
};

/// Scores `candidate` against `reference`. Ties in the max prefer matching,
/// then missing, then redundant. Throws SchemaError for empty sequences or
/// tokens outside `taxonomy`.
AlignmentResult align(
  std::span<const MetaAction> reference, std::span<const MetaAction> candidate,
  const ScoreWeights & weights = {}, const Taxonomy & taxonomy = Taxonomy::defaults());

/// Replays a step sequence and returns the summed reward minus penalties.
/// Throws std::invalid_argument if the steps do not form a valid alignment.
double replay(
  std::span<const MetaAction> reference, std::span<const MetaAction> candidate,
  std::span<const Step> steps, const ScoreWeights & weights = {});

struct BestScore
{
  double normalized_score{0.0};
  std::size_t reference_index{0};
  double raw_score{0.0};
};

/// Max over references of the normalized score; ties go to the lowest index.
BestScore score_with_alternatives(
  std::span<const MetaActionSequence> references, std::span<const MetaAction> candidate,
  const ScoreWeights & weights = {}, const Taxonomy & taxonomy = Taxonomy::defaults());

/// Normalized score limited to [0, 1] for dashboards; reports keep the raw value.
inline double clamp_score(double normalized) {return std::clamp(normalized, 0.0, 1.0);}

/// token -> near-synonyms that may replace it.
using SubstitutionTable = std::map<std::string, std::vector<std::string>>;

/// Symmetric pairs: speed-change intensity, shift vs. lane change on the same
/// side, constant speed vs. slowly.
const SubstitutionTable & default_substitutions();

/// Parses {"Slow down": ["Slow down rapidly"], ...}; tokens are resolved
/// against the vocabulary.
SubstitutionTable substitutions_from_json(const io::Json & doc, const Taxonomy & taxonomy);

/// Cartesian product of per-position choices (the token itself first, then its
/// synonyms), in lexicographic choice order, without the reference itself,
/// deduplicated, truncated to `limit`.
std::vector<MetaActionSequence> generate_alternatives(
  std::span<const MetaAction> reference, const SubstitutionTable & table,
  std::size_t limit = 64, const Taxonomy & taxonomy = Taxonomy::defaults());

}  // namespace sup::actions

#endif  // SUP__ACTION_SCORER_HPP_
