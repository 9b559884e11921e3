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

#include "sup/judge.hpp"

#include <httplib.h>

#include <map>
#include <mutex>
#include <set>
#include <utility>

#include "sup/errors.hpp"
#include "sup/parallel.hpp"
#include "sup/scenario_io.hpp"

namespace sup::description
{

namespace
{

constexpr const char * kPromptV1 =
  "You are evaluating a driving-scene description written by a model against a "
  "human-written reference description.\n"
  "1. List the key information items of the reference. Each item is either an "
  "environment condition (field weather, time, road or lane) or a critical event "
  "(an object, what it is doing, and how it affects the ego vehicle).\n"
  "2. List the key information items of the model output in the same way.\n"
  "3. Pair output items with reference items: 'matched' when the output conveys the "
  "reference item completely, 'partial' when it conveys part of it. Each item takes "
  "part in at most one pair.\n"
  "Matched pairs earn 1.0, partial pairs 0.5, and every output item without a "
  "counterpart costs 0.25; the total is divided by the number of reference items.\n"
  "Reply with JSON only, using zero-based indices:\n"
  "{\"gt_items\": [{\"kind\": \"environment\" | \"critical_event\", \"field\": \"...\", "
  "\"content\": \"...\"}], \"out_items\": [...], "
  "\"pair_labels\": [{\"gt\": 0, \"out\": 0, \"label\": \"matched\" | \"partial\"}]}\n\n"
  "Reference description:\n{reference}\n\nOutput description:\n{output}\n";

void replace_all(std::string & s, const std::string & from, const std::string & to)
{
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string request_key(const JudgeRequest & r)
{
  return io::Json{{"reference_description", r.reference_description},
    {"output_description", r.output_description},
    {"prompt_template_id", r.prompt_template_id}}.dump();
}

std::vector<KeyInfo> items_from(const io::Json & doc, const char * key)
{
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) {
    throw GatewayError(std::string("judge response: '") + key + "' must be an array");
  }
  std::vector<KeyInfo> out;
  for (const auto & item : *it) {
    if (!item.is_object() || !item.contains("kind") || !item.contains("content") ||
      !item["kind"].is_string() || !item["content"].is_string())
    {
      throw GatewayError(std::string("judge response: malformed entry in '") + key + "'");
    }
    const std::string kind = item["kind"].get<std::string>();
    KeyKind k;
    if (kind == "environment") {
      k = KeyKind::environment;
    } else if (kind == "critical_event") {
      k = KeyKind::critical_event;
    } else {
      throw GatewayError("judge response: unknown item kind '" + kind + "'");
    }
    std::optional<std::string> field;
    if (item.contains("field") && item["field"].is_string()) {
      field = item["field"].get<std::string>();
    }
    try {
      out.push_back(make_key_info(k, field, item["content"].get<std::string>()));
    } catch (const SchemaError & e) {
      throw GatewayError(std::string("judge response: ") + e.what());
    }
  }
  return out;
}

class LabelMatcher : public Matcher
{
public:
  explicit LabelMatcher(const std::vector<PairLabel> & labels)
  {
    for (const auto & l : labels) {
      sim_[{l.gt, l.out}] = l.label == MatchLabel::matched ? 1.0 : 0.5;
    }
  }

  double similarity(std::size_t gi, const KeyInfo &, std::size_t oi, const KeyInfo &) const
  override
  {
    auto it = sim_.find({gi, oi});
    return it == sim_.end() ? 0.0 : it->second;
  }

private:
  std::map<std::pair<std::size_t, std::size_t>, double> sim_;
};

}  // namespace

std::string render_prompt(const JudgeRequest & request)
{
  if (request.prompt_template_id != kDefaultPromptTemplate) {
    throw GatewayError("unknown prompt template '" + request.prompt_template_id + "'");
  }
  std::string prompt = kPromptV1;
  replace_all(prompt, "{reference}", request.reference_description);
  replace_all(prompt, "{output}", request.output_description);
  return prompt;
}

io::Json request_to_json(const JudgeRequest & r)
{
  return io::Json{{"reference_description", r.reference_description},
    {"output_description", r.output_description},
    {"prompt_template_id", r.prompt_template_id}, {"prompt", render_prompt(r)}};
}

JudgeRequest request_from_json(const io::Json & doc)
{
  auto str = [&](const char * key) {
      if (!doc.is_object() || !doc.contains(key) || !doc[key].is_string()) {
        throw SchemaError(std::string("judge request: '") + key + "' must be a string");
      }
      return doc[key].get<std::string>();
    };
  JudgeRequest r{str("reference_description"), str("output_description"), kDefaultPromptTemplate};
  if (doc.contains("prompt_template_id")) {
    r.prompt_template_id = str("prompt_template_id");
  }
  return r;
}

JudgeResponse response_from_json(const io::Json & doc)
{
  if (!doc.is_object()) {
    throw GatewayError("judge response must be a JSON object");
  }
  JudgeResponse res;
  res.gt_items = items_from(doc, "gt_items");
  res.out_items = items_from(doc, "out_items");
  auto it = doc.find("pair_labels");
  if (it == doc.end() || !it->is_array()) {
    throw GatewayError("judge response: 'pair_labels' must be an array");
  }
  std::set<std::size_t> gt_seen;
  std::set<std::size_t> out_seen;
  for (const auto & p : *it) {
    if (!p.is_object() || !p.contains("gt") || !p.contains("out") || !p.contains("label") ||
      !p["gt"].is_number_unsigned() || !p["out"].is_number_unsigned() || !p["label"].is_string())
    {
      throw GatewayError("judge response: malformed pair label");
    }
    PairLabel l{p["gt"].get<std::size_t>(), p["out"].get<std::size_t>(), MatchLabel::matched};
    const std::string label = p["label"].get<std::string>();
    if (label == "partial") {
      l.label = MatchLabel::partial;
    } else if (label != "matched") {
      throw GatewayError("judge response: unknown label '" + label + "'");
    }
    if (l.gt >= res.gt_items.size() || l.out >= res.out_items.size()) {
      throw GatewayError("judge response: pair label index out of range");
    }
    if (!gt_seen.insert(l.gt).second || !out_seen.insert(l.out).second) {
      throw GatewayError("judge response: an item appears in more than one pair");
    }
    res.pair_labels.push_back(l);
  }
  return res;
}

io::Json response_to_json(const JudgeResponse & r)
{
  auto items = [](const std::vector<KeyInfo> & v) {
      io::Json arr = io::Json::array();
      for (const auto & k : v) {
        io::Json j{{"kind", to_string(k.kind)}};
        if (k.field_name) {
          j["field"] = *k.field_name;
        }
        j["content"] = k.content;
        arr.push_back(std::move(j));
      }
      return arr;
    };
  io::Json labels = io::Json::array();
  for (const auto & l : r.pair_labels) {
    labels.push_back(io::Json{{"gt", l.gt}, {"out", l.out},
        {"label", l.label == MatchLabel::matched ? "matched" : "partial"}});
  }
  return io::Json{{"gt_items", items(r.gt_items)}, {"out_items", items(r.out_items)},
    {"pair_labels", labels}};
}

ScoreBreakdown score_response(const JudgeResponse & r)
{
  if (r.gt_items.empty()) {
    throw GatewayError("judge response has no reference key information");
  }
  return classify_matches(r.gt_items, r.out_items, LabelMatcher(r.pair_labels));
}

StubJudge StubJudge::from_json(const io::Json & doc)
{
  if (!doc.is_object() || !doc.contains("responses") || !doc["responses"].is_array()) {
    throw SchemaError("stub responses: expected {\"responses\": [...]}");
  }
  StubJudge stub;
  for (const auto & entry : doc["responses"]) {
    if (!entry.is_object() || !entry.contains("request") || !entry.contains("response")) {
      throw SchemaError("stub responses: each entry needs 'request' and 'response'");
    }
    stub.add(request_from_json(entry["request"]), response_from_json(entry["response"]));
  }
  return stub;
}

void StubJudge::add(const JudgeRequest & request, JudgeResponse response)
{
  responses_[request_key(request)] = response_to_json(response);
}

JudgeResponse StubJudge::judge(const JudgeRequest & request)
{
  auto it = responses_.find(request_key(request));
  if (it == responses_.end()) {
    throw GatewayError("stub judge has no canned response for this request");
  }
  return response_from_json(it->second);
}

HttpJudge::HttpJudge(std::string url, std::chrono::milliseconds timeout)
: timeout_(timeout)
{
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw std::invalid_argument("judge endpoint must be an http:// URL");
  }
  const auto slash = url.find('/', scheme.size());
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

JudgeResponse HttpJudge::judge(const JudgeRequest & request)
{
  httplib::Client client(base_);
  const auto sec = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - sec);
  client.set_connection_timeout(sec.count(), usec.count());
  client.set_read_timeout(sec.count(), usec.count());
  client.set_write_timeout(sec.count(), usec.count());

  auto res = client.Post(path_, request_to_json(request).dump(), "application/json");
  if (!res) {
    throw GatewayError("judge request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw GatewayError("judge returned HTTP " + std::to_string(res->status));
  }
  io::Json body;
  try {
    body = io::Json::parse(res->body);
  } catch (const nlohmann::json::exception &) {
    throw GatewayError("judge returned a body that is not JSON");
  }
  return response_from_json(body);
}

std::vector<JudgeOutcome> judge_all(
  JudgeGateway & gateway, const std::vector<JudgeRequest> & requests, std::size_t max_in_flight)
{
  std::vector<JudgeOutcome> out(requests.size());
  parallel_for(requests.size(), max_in_flight, [&](std::size_t i) {
      try {
        out[i] = score_response(gateway.judge(requests[i]));
      } catch (const GatewayError & e) {
        out[i] = std::string(e.what());
      }
    });
  return out;
}

}  // namespace sup::description
