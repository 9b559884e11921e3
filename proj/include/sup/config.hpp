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

#ifndef SUP__CONFIG_HPP_
#define SUP__CONFIG_HPP_

#include <chrono>
#include <string>
#include <vector>

#include "sup/action_scorer.hpp"
#include "sup/canonical_json.hpp"
#include "sup/dataset_pipeline.hpp"
#include "sup/description_scorer.hpp"
#include "sup/object_matcher.hpp"
#include "sup/planning_metrics.hpp"
#include "sup/taxonomy.hpp"
#include "sup/trajectory_planner.hpp"

namespace sup
{

struct JudgeSettings
{
  /// http://host[:port]/path; empty means no remote judge.
  std::string endpoint;
  /// Canned responses file for offline runs.
  std::string stub;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight{4};
};

/// Everything a subcommand can be tuned with. Defaults are usable as-is.
struct ToolConfig
{
  Taxonomy taxonomy{Taxonomy::defaults()};
  actions::ScoreWeights weights;
  actions::SubstitutionTable substitutions{actions::default_substitutions()};
  std::size_t alternatives_limit{64};
  description::MatchThresholds thresholds;
  matching::MatchConfig matching;
  planning::PlannerConfig planner;
  dataset::MiningConfig mining;
  dataset::SplitRatio split;
  double speed_tolerance{2.0};
  metrics::EgoDims ego;
  std::vector<double> horizons{metrics::default_horizons()};
  JudgeSettings judge;
  unsigned jobs{1};

  /// Throws SchemaError naming the offending key.
  void validate() const;
};

/// Reads a JSON config. Every key is optional; unknown keys are rejected.
/// Relative paths (vocabulary, substitutions, judge.stub) resolve against the
/// file's directory and must exist.
ToolConfig load_config(const std::string & path);
ToolConfig config_from_json(const io::Json & doc, const std::string & base_dir = ".");

io::Json config_to_json(const ToolConfig & config);

}  // namespace sup

#endif  // SUP__CONFIG_HPP_
