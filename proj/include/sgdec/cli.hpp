// Copyright (c) 2026, the sgdec authors.
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

#ifndef SGDEC_CLI_HPP_
#define SGDEC_CLI_HPP_

#include <string>
#include <vector>

namespace sgdec::cli {

inline constexpr const char* kVersion = "0.1.0";

// Full command-line front end. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 numeric failure. Every subcommand writes a manifest.json
// into its --out directory recording the resolved flags and input digests;
// re-running with the recorded flags regenerates every artifact
// byte-identically.
int run(int argc, const char* const* argv);

// Convenience wrapper for in-process callers; args excludes the program
// name.
int run(const std::vector<std::string>& args);

}  // namespace sgdec::cli

#endif  // SGDEC_CLI_HPP_
