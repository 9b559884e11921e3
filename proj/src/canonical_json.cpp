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

#include "sup/canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace sup::io
{

std::string format_fixed6(double value)
{
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot serialize non-finite number");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") {
    out = "0.000000";
  }
  return out;
}

namespace
{

void write(const Json & v, int indent, int depth, std::string & out)
{
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
      if (pretty) {
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
      }
    };

  switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
          out += "{}";
          return;
        }
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
          if (!first) {
            out += ',';
          }
          first = false;
          newline(depth + 1);
          out += Json(it.key()).dump();
          out += pretty ? ": " : ":";
          write(it.value(), indent, depth + 1, out);
        }
        newline(depth);
        out += '}';
        return;
      }
    case Json::value_t::array: {
        if (v.empty()) {
          out += "[]";
          return;
        }
        // Short numeric arrays (points, boxes) stay on one line.
        bool flat = v.size() <= 6;
        for (const auto & e : v) {
          flat = flat && e.is_number();
        }
        out += '[';
        bool first = true;
        for (const auto & e : v) {
          if (!first) {
            out += flat && pretty ? ", " : ",";
          }
          first = false;
          if (!flat) {
            newline(depth + 1);
          }
          write(e, indent, depth + 1, out);
        }
        if (!flat) {
          newline(depth);
        }
        out += ']';
        return;
      }
    case Json::value_t::number_float:
      out += format_fixed6(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_canonical(const Json & value, int indent)
{
  std::string out;
  write(value, indent, 0, out);
  return out;
}

}  // namespace sup::io
