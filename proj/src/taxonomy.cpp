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

#include "sup/taxonomy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <utility>

#include "sup/errors.hpp"

namespace sup
{

namespace
{

std::optional<std::string> find_folded(
  const std::vector<std::string> & labels, std::string_view needle)
{
  const std::string key = fold_label(needle);
  for (const auto & l : labels) {
    if (fold_label(l) == key) {
      return l;
    }
  }
  return std::nullopt;
}

std::vector<std::string> string_list(const io::Json & doc, const char * key,
  const std::vector<std::string> & fallback)
{
  if (!doc.contains(key)) {
    return fallback;
  }
  const auto & arr = doc.at(key);
  if (!arr.is_array()) {
    throw SchemaError(std::string("taxonomy: '") + key + "' must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto & e : arr) {
    if (!e.is_string() || e.get<std::string>().empty()) {
      throw SchemaError(std::string("taxonomy: '") + key + "' must hold non-empty strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

std::string fold_label(std::string_view s)
{
  std::string out;
  bool pending_space = false;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

Taxonomy::Taxonomy(
  std::vector<std::string> meta_actions, std::vector<std::string> conservative,
  std::vector<std::string> weather, std::vector<std::string> time,
  std::vector<std::string> road)
: meta_actions_(std::move(meta_actions)), weather_(std::move(weather)),
  time_(std::move(time)), road_(std::move(road))
{
  if (meta_actions_.empty()) {
    throw SchemaError("taxonomy: meta-action vocabulary is empty");
  }
  for (std::size_t i = 0; i < meta_actions_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (fold_label(meta_actions_[i]) == fold_label(meta_actions_[j])) {
        throw SchemaError("taxonomy: duplicate meta-action '" + meta_actions_[i] + "'");
      }
    }
  }
  for (const auto & c : conservative) {
    auto canon = find_folded(meta_actions_, c);
    if (!canon) {
      throw SchemaError("taxonomy: conservative action '" + c + "' is not in the vocabulary");
    }
    conservative_.push_back(*canon);
  }
  slots_.assign(std::bit_ceil(std::max<std::size_t>(16, 2 * meta_actions_.size())), -1);
  for (std::size_t i = 0; i < meta_actions_.size(); ++i) {
    std::size_t h = slot_of(meta_actions_[i]);
    while (slots_[h] >= 0) {
      h = (h + 1) & (slots_.size() - 1);
    }
    slots_[h] = static_cast<std::int32_t>(i);
  }
}

const Taxonomy & Taxonomy::defaults()
{
  static const Taxonomy instance(
    {"Speed up", "Slow down", "Speed up rapidly", "Slow down rapidly", "Go straight slowly",
      "Go straight at a constant speed", "Turn left", "Turn right", "Change lane to the left",
      "Change lane to the right", "Shift slightly to the left", "Shift slightly to the right",
      "Stop", "Wait", "Turn around", "Reverse"},
    {"Slow down", "Wait", "Go straight slowly"},
    {"sunny", "cloudy", "overcast", "rainy", "snowy", "foggy"},
    {"day", "night"},
    {"urban", "suburban", "highway", "rural"});
  return instance;
}

Taxonomy Taxonomy::from_json(const io::Json & doc)
{
  if (!doc.is_object()) {
    throw SchemaError("taxonomy: document must be an object");
  }
  const auto & d = defaults();
  return Taxonomy(
    string_list(doc, "meta_actions", d.meta_actions_),
    string_list(doc, "conservative", d.conservative_),
    string_list(doc, "weather", d.weather_),
    string_list(doc, "time", d.time_),
    string_list(doc, "road", d.road_));
}

io::Json Taxonomy::to_json() const
{
  return io::Json{
    {"meta_actions", meta_actions_}, {"conservative", conservative_}, {"weather", weather_},
    {"time", time_}, {"road", road_}};
}

std::optional<std::string> Taxonomy::canonical_token(std::string_view token) const
{
  return find_folded(meta_actions_, token);
}

bool Taxonomy::is_conservative(std::string_view token) const
{
  auto canon = canonical_token(token);
  if (!canon) {
    throw SchemaError("unknown meta-action token '" + std::string(token) + "'");
  }
  return std::find(conservative_.begin(), conservative_.end(), *canon) != conservative_.end();
}

std::optional<std::string> Taxonomy::canonical_weather(std::string_view label) const
{
  return find_folded(weather_, label);
}

std::optional<std::string> Taxonomy::canonical_time(std::string_view label) const
{
  return find_folded(time_, label);
}

std::optional<std::string> Taxonomy::canonical_road(std::string_view label) const
{
  return find_folded(road_, label);
}

}  // namespace sup
