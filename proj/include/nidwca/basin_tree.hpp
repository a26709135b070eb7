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

// Inverted basin tree. Each node owns an evolved automaton; records are
// routed by the attractor basin they fall into, and impure basins get a child
// node trained on their members with the most discriminative features moved
// to the middle of the lattice.

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "nidwca/ga.hpp"
#include "nidwca/types.hpp"

namespace nidwca {

struct BasinStats {
  BasinId basin;
  std::size_t n_total = 0;
  /// Labeled trees only.
  std::size_t n_attack = 0;
  /// Malicious index: attack fraction (labeled) or rarity 1 - n/n_largest
  /// (unlabeled).
  double r_q = 0.0;
  Label label = Label::kNormal;

  bool operator==(const BasinStats&) const = default;
};

struct TreeConfig {
  double impurity_threshold = 0.05;
  std::size_t min_split = 20;
  std::size_t max_depth = 4;
  DatasetMode mode = DatasetMode::kLabeled;
  GaConfig ga;
  EvolutionParams evolution;

  void validate() const;
};

struct TreeNode {
  DatasetMode mode = DatasetMode::kLabeled;
  /// Evolution bounds used at training time; classification must reuse them.
  EvolutionParams evolution;
  Chromosome chromosome = RuleVector({RuleId(0, false)});
  /// Cell c of this node reads original feature feature_order[c].
  std::vector<std::size_t> feature_order;
  std::map<BasinId, BasinStats> basins;
  /// Basin -> index into `children`.
  std::map<BasinId, std::size_t> child_index;
  std::vector<TreeNode> children;
  std::size_t depth = 0;

  const TreeNode* child(const BasinId& basin) const;
  std::size_t node_count() const;
  bool operator==(const TreeNode&) const = default;
};

struct PathStep {
  BasinId basin;
  /// The record's own basin was never seen in training at this node and
  /// `basin` is the nearest training basin instead.
  bool fallback = false;

  bool operator==(const PathStep&) const = default;
};

struct Verdict {
  Label label = Label::kNormal;
  double score = 0.0;
  std::vector<PathStep> path;

  bool used_fallback() const;
};

/// Groups record indices by attractor basin under `chromosome`.
std::map<BasinId, std::vector<std::size_t>> distribute(std::span<const State> states,
                                                       const Chromosome& chromosome,
                                                       const EvolutionParams& evolution);

/// Attack fraction; 0 for an empty list.
double malicious_index(std::span<const Label> member_labels);

TreeNode build_tree(const Dataset& dataset, const TreeConfig& config);

/// Applies a node's feature permutation to a record.
State permute_features(const State& record, const std::vector<std::size_t>& order);

/// Feature permutation for a child node: features ranked by the absolute
/// difference of class means among `members`, most discriminative first,
/// placed at the cell positions closest to the lattice centre.
std::vector<std::size_t> child_feature_order(const Dataset& dataset,
                                             std::span<const std::size_t> members);

/// Training basin closest to `basin` (L1 over fingerprints, ties to the lower
/// BasinId). Overflow or width-mismatched basins resolve to the most populated
/// training basin.
const BasinStats& nearest_basin(const TreeNode& node, const BasinId& basin);

Verdict classify(const State& record, const TreeNode& tree, double threshold = 0.5);

/// Unlabeled trees only: 1 - n_landing / n_largest, 1 for unseen basins.
double anomaly_score(const State& record, const TreeNode& tree);

}  // namespace nidwca
