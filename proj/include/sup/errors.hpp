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

#ifndef SUP__ERRORS_HPP_
#define SUP__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sup
{

/// Malformed structured text: the document could not be tokenized.
class SyntaxError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Well-formed document that violates the record schema or a type invariant.
class SchemaError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Input file missing or unreadable.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Failure talking to an external judge (network, timeout, bad response).
class GatewayError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sup

#endif  // SUP__ERRORS_HPP_
