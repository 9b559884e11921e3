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

#ifndef SUP__JUDGE_HPP_
#define SUP__JUDGE_HPP_

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sup/canonical_json.hpp"
#include "sup/description_scorer.hpp"

namespace sup::description
{

inline constexpr const char * kDefaultPromptTemplate = "sup-description/1";

struct JudgeRequest
{
  std::string reference_description;
  std::string output_description;
  std::string prompt_template_id{kDefaultPromptTemplate};

  friend bool operator==(const JudgeRequest &, const JudgeRequest &) = default;
};

struct PairLabel
{
  std::size_t gt{0};
  std::size_t out{0};
  MatchLabel label{MatchLabel::matched};
};

struct JudgeResponse
{
  std::vector<KeyInfo> gt_items;
  std::vector<KeyInfo> out_items;
  std::vector<PairLabel> pair_labels;
};

/// Prompt text sent with a request. Only kDefaultPromptTemplate is defined.
std::string render_prompt(const JudgeRequest & request);

/// {reference_description, output_description, prompt_template_id, prompt}
io::Json request_to_json(const JudgeRequest & request);
JudgeRequest request_from_json(const io::Json & doc);

/// {gt_items: [{kind, field?, content}], out_items: [...],
///  pair_labels: [{gt, out, label: matched|partial}]}. Validates indices and
/// one-to-one use; throws GatewayError on any violation.
JudgeResponse response_from_json(const io::Json & doc);
io::Json response_to_json(const JudgeResponse & response);

/// Scores the judge's labels: 1.0 per matched pair, 0.5 per partial pair,
/// unlabeled output items count as hallucinations.
ScoreBreakdown score_response(const JudgeResponse & response);

class JudgeGateway
{
public:
  virtual ~JudgeGateway() = default;
  /// Throws GatewayError on transport failure, timeout or invalid response.
  virtual JudgeResponse judge(const JudgeRequest & request) = 0;
};

/// Replays canned responses keyed by the full request. Unknown requests fail.
/// File format: {"responses": [{"request": {...}, "response": {...}}, ...]}.
class StubJudge : public JudgeGateway
{
public:
  StubJudge() = default;
  static StubJudge from_json(const io::Json & doc);

  void add(const JudgeRequest & request, JudgeResponse response);
  JudgeResponse judge(const JudgeRequest & request) override;

private:
  std::map<std::string, io::Json> responses_;
};

/// POSTs request_to_json to `url` (http://host[:port]/path) and parses the body.
class HttpJudge : public JudgeGateway
{
public:
  HttpJudge(std::string url, std::chrono::milliseconds timeout);
  JudgeResponse judge(const JudgeRequest & request) override;

private:
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

using JudgeOutcome = std::variant<ScoreBreakdown, std::string>;

/// Runs every request through `gateway` with at most `max_in_flight`
/// concurrent calls. Failures are kept per request as error text.
std::vector<JudgeOutcome> judge_all(
  JudgeGateway & gateway, const std::vector<JudgeRequest> & requests, std::size_t max_in_flight);

}  // namespace sup::description

#endif  // SUP__JUDGE_HPP_
