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

// Canonical JSON helpers shared by model, config and report files.

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace nidwca {

/// Rounds to 9 significant digits; such values print in at most 9 digits.
double round_sig9(double x);

/// Sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const nlohmann::json& doc);

/// Writes bytes, throwing kIo on failure.
void write_file(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace nidwca
