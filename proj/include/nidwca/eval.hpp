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

// Detection metrics, threshold sweeps and the per-category experiment.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nidwca/basin_tree.hpp"
#include "nidwca/kdd.hpp"

namespace nidwca {

/// Attack is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Each rate is 0 when its denominator is 0.
struct Metrics {
  double detection_rate = 0.0;
  double false_positive_rate = 0.0;
  double precision = 0.0;
  double accuracy = 0.0;

  bool operator==(const Metrics&) const = default;
};

struct CurvePoint {
  double threshold = 0.0;
  ConfusionCounts counts;
  Metrics metrics;
};

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths);

Metrics metrics(const ConfusionCounts& c);

/// {0.00, 0.01, ..., 1.00}.
std::vector<double> default_grid();

/// Attack iff score >= t, for each t of an ascending grid.
std::vector<CurvePoint> sweep_threshold(std::span<const double> scores,
                                        std::span<const Label> truths,
                                        std::span<const double> grid);

/// Maximal detection_rate - false_positive_rate, ties to the lower threshold.
const CurvePoint& best_point(const std::vector<CurvePoint>& curve);

struct ClassifierTarget {
  /// Also the curve file stem; letters, digits, '-' and '_' only.
  std::string name;
  std::vector<AttackCategory> positives;

  bool operator==(const ClassifierTarget&) const = default;
};

struct ExperimentPlan {
  std::vector<ClassifierTarget> targets = {
      {"I", {AttackCategory::kDoS}},
      {"II", {AttackCategory::kProbe}},
      {"III", {AttackCategory::kR2L, AttackCategory::kU2R}},
  };
  std::uint64_t seed = 0;

  /// Targets non-empty, disjoint, no Normal among positives, valid names.
  void validate() const;
};

struct ClassifierResult {
  std::string name;
  double train_seconds = 0.0;
  std::size_t train_records = 0;
  std::size_t test_records = 0;
  Normalizer normalizer;
  TreeNode tree;
  std::vector<CurvePoint> curve;
};

struct ExperimentReport {
  /// Echoed verbatim into the summary.
  nlohmann::json config = nlohmann::json::object();
  /// Input name -> "sha256:<hex>".
  std::map<std::string, std::string> input_digests;
  std::vector<ClassifierResult> classifiers;
};

/// Trains one independent tree per target on (positives + Normal) training
/// records and sweeps its scores on the matching test records. `tree.ga.seed`
/// is replaced by a seed derived from the plan seed and the target index.
ExperimentReport run_experiment(const std::vector<ConnectionRecord>& train,
                                const std::vector<ConnectionRecord>& test,
                                const ExperimentPlan& plan, const TreeConfig& tree,
                                std::size_t workers = 1);

/// Header plus one row per point, 6 fractional digits, LF endings.
std::string curve_csv(const std::vector<CurvePoint>& curve);

nlohmann::json summary_json(const ExperimentReport& report);

/// Writes <name>.csv per classifier and summary.json into `out_dir`.
void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace nidwca
