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

// Trained model files: one canonical JSON document holding the normalizer,
// the taxonomy digest, the config echo and the recursive basin tree.
//
// Reals are written with at most 9 significant digits. Malicious indices are
// written for readers but recomputed from basin counts on load.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "nidwca/basin_tree.hpp"
#include "nidwca/config.hpp"
#include "nidwca/kdd.hpp"

namespace nidwca {

inline constexpr int kModelFormatVersion = 1;

struct Model {
  Normalizer normalizer;
  std::string taxonomy_digest;
  RunConfig config;
  TreeNode tree;

  DatasetMode mode() const { return tree.mode; }
  std::uint64_t seed() const { return config.seed(); }
};

nlohmann::json model_to_json(const Model& model);
std::string serialize_model(const Model& model);

/// kCorruptFile if the text is not JSON, kVersionMismatch on an unknown
/// format_version, kSchema on any structural violation.
Model parse_model(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Classifies a raw record with the model's normalizer and tree.
Verdict classify_record(const ConnectionRecord& record, const Model& model, double threshold);

}  // namespace nidwca
