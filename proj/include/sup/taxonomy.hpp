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

#ifndef SUP__TAXONOMY_HPP_
#define SUP__TAXONOMY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sup/canonical_json.hpp"

namespace sup
{

/// Closed label sets used to validate scenario records: the meta-action
/// vocabulary, its conservative subset, and the enumerated environment fields.
///
/// Token lookup ignores case and surrounding whitespace; the canonical
/// spelling is the one stored in the vocabulary.
class Taxonomy
{
public:
  Taxonomy(
    std::vector<std::string> meta_actions, std::vector<std::string> conservative,
    std::vector<std::string> weather, std::vector<std::string> time,
    std::vector<std::string> road);

  static const Taxonomy & defaults();

  /// Reads `{"meta_actions": [...], "conservative": [...], ...}`. Missing keys
  /// fall back to the defaults.
  static Taxonomy from_json(const io::Json & doc);
  io::Json to_json() const;

  const std::vector<std::string> & meta_actions() const {return meta_actions_;}
  const std::vector<std::string> & conservative() const {return conservative_;}
  const std::vector<std::string> & weather_labels() const {return weather_;}
  const std::vector<std::string> & time_labels() const {return time_;}
  const std::vector<std::string> & road_labels() const {return road_;}

  /// Canonical spelling of `token`, or nullopt if it is not in the vocabulary.
  std::optional<std::string> canonical_token(std::string_view token) const;

  /// Exact (canonical-spelling) membership test.
  bool contains(std::string_view token) const {return index_of(token) >= 0;}
  /// Position in meta_actions() of an exactly spelled token, or -1.
  int index_of(std::string_view token) const;

  /// Throws SchemaError for tokens outside the vocabulary.
  bool is_conservative(std::string_view token) const;

  std::optional<std::string> canonical_weather(std::string_view label) const;
  std::optional<std::string> canonical_time(std::string_view label) const;
  std::optional<std::string> canonical_road(std::string_view label) const;

private:
  std::vector<std::string> meta_actions_;
  std::vector<std::string> conservative_;
  std::vector<std::string> weather_;
  std::vector<std::string> time_;
  std::vector<std::string> road_;
  // Open-addressed index into meta_actions_; -1 marks an empty slot. The
  // lookup runs for every token of every alignment.
  std::vector<std::int32_t> slots_;

  std::size_t slot_of(std::string_view s) const;
};

/// Lower-cases and trims; interior whitespace runs collapse to one space.
std::string fold_label(std::string_view s);

inline std::size_t Taxonomy::slot_of(std::string_view s) const
{
  if (s.empty()) {
    return 0;
  }
  const auto b = [&](std::size_t i) {return static_cast<std::size_t>(
        static_cast<unsigned char>(s[i]));};
  return (s.size() * 31 + b(0) * 7 + b(s.size() / 2) * 3 + b(s.size() - 1)) &
         (slots_.size() - 1);
}

inline int Taxonomy::index_of(std::string_view token) const
{
  for (std::size_t h = slot_of(token); slots_[h] >= 0; h = (h + 1) & (slots_.size() - 1)) {
    if (meta_actions_[static_cast<std::size_t>(slots_[h])] == token) {
      return slots_[h];
    }
  }
  return -1;
}

}  // namespace sup

#endif  // SUP__TAXONOMY_HPP_
