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

// Run configuration and its JSON form. The same document is echoed into
// report summaries and model files, and is accepted back by --config.
//
//   {
//     "seed": 0, "mode": "labeled",
//     "tree": {"impurity_threshold", "min_split", "max_depth"},
//     "ga": {"population_size", "generations", "crossover_rate",
//            "mutation_rate", "elitism_count", "tournament_size",
//            "target_basins", "penalty_weight"},
//     "evolution": {"max_steps", "quantization_eps", "max_cycle_len"},
//     "classifiers": [{"name": "I", "positives": ["DoS"]}, ...]
//   }
//
// Every key is optional; unknown keys are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "json.hpp"
#include "nidwca/basin_tree.hpp"
#include "nidwca/eval.hpp"

namespace nidwca {

struct RunConfig {
  TreeConfig tree;
  ExperimentPlan plan;

  std::uint64_t seed() const { return tree.ga.seed; }
  void set_seed(std::uint64_t seed);
  void validate() const;
};

std::string_view mode_name(DatasetMode m);
/// "labeled" or "unlabeled"; kConfig otherwise.
DatasetMode parse_mode(std::string_view name);

nlohmann::json config_to_json(const RunConfig& config);

/// Throws kConfig on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& doc);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace nidwca
