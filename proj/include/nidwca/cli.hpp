// Copyright 2026 The NIDWCA Authors.
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

// Command-line front end: train, evaluate, classify, inspect, gen-synthetic.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nidwca/basin_tree.hpp"

namespace nidwca {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. Errors are reported on `err` as one
/// line starting with "error[<kind>]: ".
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err);

/// Node-local basin indices joined by '/'. A '*' suffix marks a nearest-basin
/// fallback; "new" marks a basin an unlabeled tree never saw.
std::string format_basin_path(const Verdict& verdict, const TreeNode& tree);

}  // namespace nidwca
