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

#ifndef SUP__CLI_HPP_
#define SUP__CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace sup::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. Reports go to `out` (or the --out file), diagnostics
/// to `err`.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace sup::cli

#endif  // SUP__CLI_HPP_
