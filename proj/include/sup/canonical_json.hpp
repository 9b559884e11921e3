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

#ifndef SUP__CANONICAL_JSON_HPP_
#define SUP__CANONICAL_JSON_HPP_

#include <json.hpp>

#include <string>

namespace sup::io
{

using Json = nlohmann::ordered_json;

// Writes JSON with insertion-ordered keys and every floating-point number in
// fixed notation with six decimals. Negative zero prints as zero. An indent
// below zero produces a single line.
std::string dump_canonical(const Json & value, int indent = -1);

std::string format_fixed6(double value);

}  // namespace sup::io

#endif  // SUP__CANONICAL_JSON_HPP_
