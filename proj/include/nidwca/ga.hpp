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

// Genetic search over hybrid rule vectors. The genome is the rule vector
// itself (one gene per cell); fitness is how cleanly the automaton's basins
// partition a training set.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nidwca/fca.hpp"
#include "nidwca/types.hpp"

namespace nidwca {

using Chromosome = RuleVector;

struct GaConfig {
  std::size_t population_size = 64;
  std::size_t generations = 50;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  std::size_t elitism_count = 2;
  std::size_t tournament_size = 3;
  std::size_t target_basins_k = 2;
  double basin_penalty_weight = 0.1;
  std::uint64_t seed = 0;
  /// Fitness evaluation threads, 0 = auto. Does not affect results.
  std::size_t workers = 1;

  void validate() const;
};

struct FitnessScore {
  double purity = 0.0;
  std::size_t basin_count = 0;
  double penalty = 0.0;
  double total = 0.0;

  bool operator==(const FitnessScore&) const = default;
};

struct GenerationStats {
  FitnessScore best;          // best individual of this generation
  double mean_total = 0.0;    // population mean of FitnessScore::total
  double best_so_far = 0.0;   // best total seen up to and including this generation

  bool operator==(const GenerationStats&) const = default;
};

struct EvolutionOutcome {
  Chromosome best;
  FitnessScore best_score;
  /// Entry 0 is the random initial population.
  std::vector<GenerationStats> history;
};

Chromosome random_chromosome(std::size_t n_cells, std::uint64_t seed);

/// Single-point crossover: the first `cut` genes come from one parent and the
/// rest from the other. Requires 1 <= cut < length.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            std::size_t cut);

/// Replaces each gene with probability `rate` by a different alphabet member.
Chromosome mutate(const Chromosome& c, double rate, std::uint64_t seed);

/// Attractor basin of every state under `c`, in input order.
std::vector<BasinId> assign_basins(std::span<const State> states, const Chromosome& c,
                                   const EvolutionParams& evolution);

/// Labeled data: purity = sum_q (n_q/N) max(R_q, 1-R_q). Unlabeled data:
/// purity = fraction of feature variance explained by basin membership.
/// total = purity - weight * |basins - k| / k.
FitnessScore fitness(const Chromosome& c, const Dataset& dataset, const GaConfig& config,
                     const EvolutionParams& evolution = {});

/// Scores a precomputed basin assignment; shared by fitness() and tests.
FitnessScore score_partition(std::span<const BasinId> basins, const Dataset& dataset,
                             const GaConfig& config);

EvolutionOutcome evolve_population(const Dataset& dataset, std::size_t n_cells,
                                   const GaConfig& config,
                                   const EvolutionParams& evolution = {});

}  // namespace nidwca
