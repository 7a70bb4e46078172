/*
 * Copyright 2026 The DAPr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DAPR_CLI_CLI_HPP_
#define DAPR_CLI_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace dapr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime failure
inline constexpr int kExitUsage = 2;    // bad flags or configuration

// Runs "dapr <args...>" (args excludes the program name) and returns the
// exit code. Messages go to out / err; nothing is written to std::cout.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dapr::cli

#endif  // DAPR_CLI_CLI_HPP_
