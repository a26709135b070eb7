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

#include "nidwca/basin_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nidwca/parallel.hpp"

namespace nidwca {

void TreeConfig::validate() const {
  if (!(impurity_threshold >= 0.0 && impurity_threshold < 0.5)) {
    throw Error(ErrorKind::kConfig, "tree.impurity_threshold must lie in [0, 0.5)");
  }
  ga.validate();
  evolution.validate();
}

const TreeNode* TreeNode::child(const BasinId& basin) const {
  const auto it = child_index.find(basin);
  return it == child_index.end() ? nullptr : &children[it->second];
}

std::size_t TreeNode::node_count() const {
  std::size_t n = 1;
  for (const TreeNode& c : children) n += c.node_count();
  return n;
}

bool Verdict::used_fallback() const {
  return std::any_of(path.begin(), path.end(), [](const PathStep& s) { return s.fallback; });
}

std::map<BasinId, std::vector<std::size_t>> distribute(std::span<const State> states,
                                                       const Chromosome& chromosome,
                                                       const EvolutionParams& evolution) {
  for (const State& s : states) {
    if (s.size() != chromosome.n_cells()) {
      throw Error(ErrorKind::kDimension, "record width " + std::to_string(s.size()) +
                                             " does not match " +
                                             std::to_string(chromosome.n_cells()) + " cells");
    }
  }
  const std::vector<BasinId> ids = assign_basins(states, chromosome, evolution);
  std::map<BasinId, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]].push_back(i);
  return out;
}

double malicious_index(std::span<const Label> member_labels) {
  if (member_labels.empty()) return 0.0;
  const auto attacks = std::count(member_labels.begin(), member_labels.end(), Label::kAttack);
  return static_cast<double>(attacks) / static_cast<double>(member_labels.size());
}

State permute_features(const State& record, const std::vector<std::size_t>& order) {
  if (static_cast<std::size_t>(record.size()) != order.size()) {
    throw Error(ErrorKind::kDimension, "record width " + std::to_string(record.size()) +
                                           " does not match " + std::to_string(order.size()) +
                                           " cells");
  }
  State out(record.size());
  for (std::size_t c = 0; c < order.size(); ++c) {
    out[static_cast<Eigen::Index>(c)] = record[static_cast<Eigen::Index>(order[c])];
  }
  return out;
}

std::vector<std::size_t> child_feature_order(const Dataset& dataset,
                                             std::span<const std::size_t> members) {
  const Eigen::Index width = dataset.front().state.size();
  const auto n = static_cast<std::size_t>(width);
  Eigen::VectorXd attack_sum = Eigen::VectorXd::Zero(width);
  Eigen::VectorXd normal_sum = Eigen::VectorXd::Zero(width);
  std::size_t n_attack = 0;
  for (std::size_t i : members) {
    if (dataset[i].label == Label::kAttack) {
      attack_sum += dataset[i].state;
      ++n_attack;
    } else {
      normal_sum += dataset[i].state;
    }
  }
  const std::size_t n_normal = members.size() - n_attack;
  Eigen::VectorXd power = Eigen::VectorXd::Zero(width);
  if (n_attack > 0 && n_normal > 0) {
    power = (attack_sum / static_cast<double>(n_attack) -
             normal_sum / static_cast<double>(n_normal)).cwiseAbs();
  }

  std::vector<std::size_t> features(n);
  std::iota(features.begin(), features.end(), 0);
  std::stable_sort(features.begin(), features.end(), [&](std::size_t a, std::size_t b) {
    return power[static_cast<Eigen::Index>(a)] > power[static_cast<Eigen::Index>(b)];
  });
  // positions by distance from the centre, 2|p - (n-1)/2| to stay integral
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  auto off_centre = [&](std::size_t p) {
    const auto d = static_cast<long long>(2 * p) - static_cast<long long>(n - 1);
    return d < 0 ? -d : d;
  };
  std::stable_sort(positions.begin(), positions.end(),
                   [&](std::size_t a, std::size_t b) { return off_centre(a) < off_centre(b); });
  std::vector<std::size_t> order(n);
  for (std::size_t r = 0; r < n; ++r) order[positions[r]] = features[r];
  return order;
}

namespace {

struct BuildContext {
  const Dataset& dataset;  // original (unpermuted) samples
  const TreeConfig& config;
};

TreeNode build_node(const BuildContext& ctx, std::vector<std::size_t> members,
                    std::vector<std::size_t> feature_order, std::size_t depth,
                    std::uint64_t seed, std::size_t workers) {
  const TreeConfig& cfg = ctx.config;
  TreeNode node;
  node.mode = cfg.mode;
  node.evolution = cfg.evolution;
  node.depth = depth;
  node.feature_order = std::move(feature_order);

  Dataset local;
  local.reserve(members.size());
  for (std::size_t i : members) {
    local.push_back({permute_features(ctx.dataset[i].state, node.feature_order),
                     cfg.mode == DatasetMode::kLabeled ? ctx.dataset[i].label : std::nullopt});
  }
  GaConfig ga = cfg.ga;
  ga.seed = seed;
  ga.workers = workers;
  node.chromosome = evolve_population(local, node.feature_order.size(), ga, cfg.evolution).best;

  std::vector<State> states;
  states.reserve(local.size());
  for (const Sample& s : local) states.push_back(s.state);
  const auto groups = distribute(states, node.chromosome, cfg.evolution);

  std::size_t largest = 0;
  for (const auto& [id, idx] : groups) largest = std::max(largest, idx.size());
  for (const auto& [id, idx] : groups) {
    BasinStats st;
    st.basin = id;
    st.n_total = idx.size();
    if (cfg.mode == DatasetMode::kLabeled) {
      std::vector<Label> labels;
      labels.reserve(idx.size());
      for (std::size_t i : idx) labels.push_back(*local[i].label);
      st.n_attack = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::kAttack));
      st.r_q = malicious_index(labels);
    } else {
      st.r_q = 1.0 - static_cast<double>(idx.size()) / static_cast<double>(largest);
    }
    st.label = st.r_q >= 0.5 ? Label::kAttack : Label::kNormal;
    node.basins.emplace(id, st);
  }

  if (cfg.mode != DatasetMode::kLabeled || depth >= cfg.max_depth) return node;

  struct Split {
    BasinId basin;
    std::vector<std::size_t> members;  // indices into ctx.dataset
    std::uint64_t seed;
  };
  std::vector<Split> splits;
  std::size_t ordinal = 0;
  for (const auto& [id, idx] : groups) {
    const BasinStats& st = node.basins.at(id);
    const double impurity = std::min(st.r_q, 1.0 - st.r_q);
    if (impurity > cfg.impurity_threshold && st.n_total >= cfg.min_split) {
      std::vector<std::size_t> sub;
      sub.reserve(idx.size());
      for (std::size_t i : idx) sub.push_back(members[i]);
      splits.push_back({id, std::move(sub), derive_seed({seed, depth + 1, ordinal})});
    }
    ++ordinal;
  }

  std::vector<TreeNode> built(splits.size());
  const std::size_t outer = splits.size() > 1 ? workers : 1;
  const std::size_t inner = splits.size() > 1 ? 1 : workers;
  parallel_for(splits.size(), outer, [&](std::size_t s) {
    std::vector<std::size_t> order = child_feature_order(ctx.dataset, splits[s].members);
    built[s] = build_node(ctx, splits[s].members, std::move(order), depth + 1, splits[s].seed,
                          inner);
  });
  for (std::size_t s = 0; s < splits.size(); ++s) {
    node.child_index.emplace(splits[s].basin, node.children.size());
    node.children.push_back(std::move(built[s]));
  }
  return node;
}

struct Landing {
  BasinId own;                // the record's basin at this node
  const BasinStats* stats;    // training basin it resolves to, null if none
  bool fallback = false;
};

Landing land(const TreeNode& node, const State& record, bool allow_fallback) {
  const State local = permute_features(record, node.feature_order);
  const BasinId id =
      basin_fingerprint(evolve_to_attractor(local, node.chromosome, node.evolution), node.evolution);
  const auto it = node.basins.find(id);
  if (it != node.basins.end()) return {id, &it->second, false};
  if (!allow_fallback) return {id, nullptr, false};
  return {id, &nearest_basin(node, id), true};
}

}  // namespace

TreeNode build_tree(const Dataset& dataset, const TreeConfig& config) {
  config.validate();
  const DatasetMode found = dataset_mode(dataset);
  if (config.mode == DatasetMode::kLabeled && found != DatasetMode::kLabeled) {
    throw Error(ErrorKind::kMode, "labeled training needs a label on every record");
  }
  const auto width = static_cast<std::size_t>(dataset.front().state.size());
  for (const Sample& s : dataset) {
    if (static_cast<std::size_t>(s.state.size()) != width) {
      throw Error(ErrorKind::kDimension, "records differ in width");
    }
  }
  std::vector<std::size_t> members(dataset.size());
  std::iota(members.begin(), members.end(), 0);
  std::vector<std::size_t> identity(width);
  std::iota(identity.begin(), identity.end(), 0);
  TreeNode root = build_node({dataset, config}, std::move(members), std::move(identity), 0,
                             config.ga.seed, config.ga.workers);
  return root;
}

const BasinStats& nearest_basin(const TreeNode& node, const BasinId& basin) {
  if (node.basins.empty()) throw Error(ErrorKind::kSchema, "tree node has no basins");
  const BasinStats* best = nullptr;
  std::int64_t best_d = 0;
  if (!basin.is_overflow()) {
    for (const auto& [id, st] : node.basins) {
      if (id.is_overflow() || id.fingerprint.size() != basin.fingerprint.size()) continue;
      const std::int64_t d = fingerprint_distance(id, basin);
      if (!best || d < best_d) {
        best = &st;
        best_d = d;
      }
    }
  }
  if (best) return *best;
  for (const auto& [id, st] : node.basins) {
    if (!best || st.n_total > best->n_total) best = &st;
  }
  return *best;
}

Verdict classify(const State& record, const TreeNode& tree, double threshold) {
  Verdict v;
  const TreeNode* node = &tree;
  const bool labeled = tree.mode == DatasetMode::kLabeled;
  while (true) {
    const Landing l = land(*node, record, labeled);
    if (!l.stats) {
      // unlabeled tree, basin never seen in training
      v.path.push_back({l.own, false});
      v.score = 1.0;
      break;
    }
    v.path.push_back({l.stats->basin, l.fallback});
    if (const TreeNode* next = node->child(l.stats->basin)) {
      node = next;
      continue;
    }
    v.score = l.stats->r_q;
    break;
  }
  v.label = v.score >= threshold ? Label::kAttack : Label::kNormal;
  return v;
}

double anomaly_score(const State& record, const TreeNode& tree) {
  if (tree.mode != DatasetMode::kUnlabeled) {
    throw Error(ErrorKind::kMode, "anomaly scores need a tree trained on unlabeled data");
  }
  return classify(record, tree, 0.5).score;
}

}  // namespace nidwca
