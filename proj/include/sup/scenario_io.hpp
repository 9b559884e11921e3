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

#ifndef SUP__SCENARIO_IO_HPP_
#define SUP__SCENARIO_IO_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sup/canonical_json.hpp"
#include "sup/scenario.hpp"

namespace sup::io
{

inline constexpr std::string_view kScenarioSchema = "sup/1";
inline constexpr std::string_view kCalibrationSchema = "sup-calib/1";

struct ParseOptions
{
  const Taxonomy * taxonomy{&Taxonomy::defaults()};
  /// Keep records that fail invariants (unknown tokens, bad boxes) so that a
  /// diagnostics pass can report them. Structural errors still throw.
  bool lenient{false};
};

ScenarioRecord parse_scenario(std::string_view document, const ParseOptions & options = {});
ScenarioRecord scenario_from_json(const Json & doc, const ParseOptions & options = {});

/// Validates, then writes the canonical form. Pretty-printed unless `compact`.
std::string serialize_scenario(
  const ScenarioRecord & record, bool compact = false,
  const Taxonomy & taxonomy = Taxonomy::defaults());
Json scenario_to_json(const ScenarioRecord & record);

/// Newline-delimited corpus: one compact record per non-blank line.
std::vector<ScenarioRecord> parse_corpus(std::string_view text, const ParseOptions & options = {});
std::string serialize_corpus(
  const std::vector<ScenarioRecord> & records,
  const Taxonomy & taxonomy = Taxonomy::defaults());

struct CorpusLine
{
  std::size_t line{0};
  std::optional<ScenarioRecord> record;
  /// Set when the line could not be read at all.
  std::optional<std::string> error;
};

/// Reads every line with lenient parsing; unreadable lines are reported, not thrown.
std::vector<CorpusLine> read_corpus_lines(std::string_view text, const Taxonomy & taxonomy);

Json trajectory_to_json(const Trajectory & traj);
Trajectory trajectory_from_json(const Json & doc, const std::string & path = "trajectory");

/// Calibration file: {"schema": "sup-calib/1", "cameras": [ ... ]}, each camera
/// with name, fx, fy, cx, cy (pixels), rotation (3x3 rows, ego->camera),
/// translation (meters), width, height (pixels).
std::vector<CameraModel> parse_calibration(std::string_view document);
std::string serialize_calibration(const std::vector<CameraModel> & cameras);

/// Parses JSON text, converting library errors into SyntaxError.
Json parse_json(std::string_view text);

std::string read_file(const std::string & path);
void write_file(const std::string & path, std::string_view content);

}  // namespace sup::io

#endif  // SUP__SCENARIO_IO_HPP_
