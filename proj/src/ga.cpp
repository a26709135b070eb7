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

#include "nidwca/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "nidwca/parallel.hpp"

namespace nidwca {

std::string_view label_name(Label l) { return l == Label::kAttack ? "attack" : "normal"; }

DatasetMode dataset_mode(const Dataset& data) {
  if (data.empty()) throw Error(ErrorKind::kEmptyInput, "dataset is empty");
  const std::size_t labeled = static_cast<std::size_t>(std::count_if(
      data.begin(), data.end(), [](const Sample& s) { return s.label.has_value(); }));
  if (labeled == data.size()) return DatasetMode::kLabeled;
  if (labeled == 0) return DatasetMode::kUnlabeled;
  throw Error(ErrorKind::kMixedLabels, "dataset mixes labeled and unlabeled records (" +
                                           std::to_string(labeled) + " of " +
                                           std::to_string(data.size()) + " labeled)");
}

void GaConfig::validate() const {
  if (population_size == 0) throw Error(ErrorKind::kConfig, "ga.population_size must be positive");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw Error(ErrorKind::kConfig, "ga.crossover_rate must lie in [0,1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw Error(ErrorKind::kConfig, "ga.mutation_rate must lie in [0,1]");
  }
  if (elitism_count >= population_size) {
    throw Error(ErrorKind::kConfig, "ga.elitism_count must be below population_size");
  }
  if (tournament_size == 0 || tournament_size > population_size) {
    throw Error(ErrorKind::kConfig, "ga.tournament_size must lie in [1, population_size]");
  }
  if (target_basins_k == 0) throw Error(ErrorKind::kConfig, "ga.target_basins_k must be positive");
  if (!(basin_penalty_weight >= 0.0)) {
    throw Error(ErrorKind::kConfig, "ga.basin_penalty_weight must be non-negative");
  }
}

namespace {

const std::vector<RuleId>& alphabet() {
  static const std::vector<RuleId> kAlphabet = rule_alphabet();
  return kAlphabet;
}

// Ranks by total (descending), ties to the lower population index.
bool fitter(const std::vector<FitnessScore>& scores, std::size_t a, std::size_t b) {
  if (scores[a].total != scores[b].total) return scores[a].total > scores[b].total;
  return a < b;
}

std::size_t tournament(const std::vector<FitnessScore>& scores, std::size_t size,
                       std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, scores.size() - 1);
  std::size_t winner = pick(rng);
  for (std::size_t i = 1; i < size; ++i) {
    const std::size_t challenger = pick(rng);
    if (fitter(scores, challenger, winner)) winner = challenger;
  }
  return winner;
}

}  // namespace

Chromosome random_chromosome(std::size_t n_cells, std::uint64_t seed) {
  if (n_cells == 0) throw Error(ErrorKind::kDimension, "chromosome needs at least one cell");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> gene(0, alphabet().size() - 1);
  std::vector<RuleId> rules;
  rules.reserve(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) rules.push_back(alphabet()[gene(rng)]);
  return Chromosome(std::move(rules));
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            std::size_t cut) {
  const auto n = static_cast<std::size_t>(a.n_cells());
  if (static_cast<std::size_t>(b.n_cells()) != n) {
    throw Error(ErrorKind::kDimension, "crossover parents differ in length");
  }
  if (cut < 1 || cut >= n) {
    throw Error(ErrorKind::kRange, "crossover cut " + std::to_string(cut) +
                                       " outside [1, " + std::to_string(n - 1) + "]");
  }
  std::vector<RuleId> c1(a.rules().begin(), a.rules().begin() + static_cast<std::ptrdiff_t>(cut));
  c1.insert(c1.end(), b.rules().begin() + static_cast<std::ptrdiff_t>(cut), b.rules().end());
  std::vector<RuleId> c2(b.rules().begin(), b.rules().begin() + static_cast<std::ptrdiff_t>(cut));
  c2.insert(c2.end(), a.rules().begin() + static_cast<std::ptrdiff_t>(cut), a.rules().end());
  return {Chromosome(std::move(c1)), Chromosome(std::move(c2))};
}

Chromosome mutate(const Chromosome& c, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::kRange, "mutation rate must lie in [0,1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> other(0, alphabet().size() - 2);
  std::vector<RuleId> genes = c.rules();
  for (RuleId& g : genes) {
    if (coin(rng) >= rate) continue;
    // draw from the alphabet with the current gene removed
    const auto here = static_cast<std::size_t>(
        std::find(alphabet().begin(), alphabet().end(), g) - alphabet().begin());
    std::size_t pick = other(rng);
    if (pick >= here) ++pick;
    g = alphabet()[pick];
  }
  return Chromosome(std::move(genes));
}

std::vector<BasinId> assign_basins(std::span<const State> states, const Chromosome& c,
                                   const EvolutionParams& evolution) {
  const CompiledRules<double> compiled(c);
  std::vector<BasinId> out;
  out.reserve(states.size());
  for (const State& s : states) {
    out.push_back(basin_fingerprint(evolve_to_attractor(compiled, s, evolution), evolution));
  }
  return out;
}

FitnessScore score_partition(std::span<const BasinId> basins, const Dataset& dataset,
                             const GaConfig& config) {
  if (basins.size() != dataset.size()) {
    throw Error(ErrorKind::kDimension, "basin assignment and dataset differ in length");
  }
  const DatasetMode mode = dataset_mode(dataset);
  const double n = static_cast<double>(dataset.size());

  std::unordered_map<BasinId, std::size_t, BasinIdHash> slot;
  std::vector<std::size_t> members;
  std::vector<std::size_t> attacks;
  std::vector<std::size_t> which(basins.size());
  for (std::size_t i = 0; i < basins.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(basins[i], members.size());
    if (inserted) {
      members.push_back(0);
      attacks.push_back(0);
    }
    which[i] = it->second;
    ++members[it->second];
    if (dataset[i].label == Label::kAttack) ++attacks[it->second];
  }

  FitnessScore score;
  score.basin_count = members.size();
  if (mode == DatasetMode::kLabeled) {
    double purity = 0.0;
    for (std::size_t q = 0; q < members.size(); ++q) {
      const double r = static_cast<double>(attacks[q]) / static_cast<double>(members[q]);
      purity += static_cast<double>(members[q]) / n * std::max(r, 1.0 - r);
    }
    score.purity = purity;
  } else {
    // 1 - within-basin sum of squares / total sum of squares
    const Eigen::Index width = dataset.front().state.size();
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(width, static_cast<Eigen::Index>(members.size()));
    double sumsq = 0.0;
    Eigen::VectorXd grand = Eigen::VectorXd::Zero(width);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      sums.col(static_cast<Eigen::Index>(which[i])) += dataset[i].state;
      grand += dataset[i].state;
      sumsq += dataset[i].state.squaredNorm();
    }
    const double total_ss = sumsq - grand.squaredNorm() / n;
    double within_ss = sumsq;
    for (std::size_t q = 0; q < members.size(); ++q) {
      within_ss -= sums.col(static_cast<Eigen::Index>(q)).squaredNorm() /
                   static_cast<double>(members[q]);
    }
    score.purity = total_ss <= 1e-12 ? 1.0 : std::clamp(1.0 - within_ss / total_ss, 0.0, 1.0);
  }
  const double k = static_cast<double>(config.target_basins_k);
  score.penalty = std::abs(static_cast<double>(score.basin_count) - k) / k;
  score.total = score.purity - config.basin_penalty_weight * score.penalty;
  return score;
}

FitnessScore fitness(const Chromosome& c, const Dataset& dataset, const GaConfig& config,
                     const EvolutionParams& evolution) {
  dataset_mode(dataset);
  std::vector<State> states;
  states.reserve(dataset.size());
  for (const Sample& s : dataset) states.push_back(s.state);
  const std::vector<BasinId> basins = assign_basins(states, c, evolution);
  return score_partition(basins, dataset, config);
}

EvolutionOutcome evolve_population(const Dataset& dataset, std::size_t n_cells,
                                   const GaConfig& config, const EvolutionParams& evolution) {
  config.validate();
  evolution.validate();
  dataset_mode(dataset);
  for (const Sample& s : dataset) {
    if (static_cast<std::size_t>(s.state.size()) != n_cells) {
      throw Error(ErrorKind::kDimension, "record width " + std::to_string(s.state.size()) +
                                             " does not match " + std::to_string(n_cells) +
                                             " cells");
    }
  }
  std::vector<State> states;
  states.reserve(dataset.size());
  for (const Sample& s : dataset) states.push_back(s.state);

  const std::size_t pop_size = config.population_size;
  std::vector<Chromosome> population;
  population.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    population.push_back(random_chromosome(n_cells, derive_seed({config.seed, 0, i})));
  }

  std::vector<FitnessScore> scores(pop_size);
  std::vector<bool> known(pop_size, false);
  auto evaluate = [&] {
    parallel_for(pop_size, config.workers, [&](std::size_t i) {
      if (known[i]) return;
      scores[i] = score_partition(assign_basins(states, population[i], evolution), dataset,
                                  config);
    });
  };

  EvolutionOutcome out{population.front(), {}, {}};
  bool have_best = false;
  auto record = [&] {
    std::size_t top = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < pop_size; ++i) {
      if (fitter(scores, i, top)) top = i;
      mean += scores[i].total;
    }
    if (!have_best || scores[top].total > out.best_score.total) {
      out.best = population[top];
      out.best_score = scores[top];
      have_best = true;
    }
    out.history.push_back({scores[top], mean / static_cast<double>(pop_size),
                           out.best_score.total});
  };

  evaluate();
  record();

  std::vector<std::size_t> order(pop_size);
  for (std::size_t g = 1; g <= config.generations; ++g) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fitter(scores, a, b); });

    std::vector<Chromosome> next;
    std::vector<FitnessScore> next_scores(pop_size);
    next.reserve(pop_size);
    std::fill(known.begin(), known.end(), false);
    for (std::size_t e = 0; e < config.elitism_count; ++e) {
      next.push_back(population[order[e]]);
      next_scores[e] = scores[order[e]];
      known[e] = true;
    }
    for (std::size_t i = config.elitism_count; i < pop_size; ++i) {
      std::mt19937_64 rng(derive_seed({config.seed, g, i}));
      const std::size_t pa = tournament(scores, config.tournament_size, rng);
      const std::size_t pb = tournament(scores, config.tournament_size, rng);
      Chromosome child = population[pa];
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (n_cells > 1 && coin(rng) < config.crossover_rate) {
        std::uniform_int_distribution<std::size_t> cut(1, n_cells - 1);
        child = crossover(population[pa], population[pb], cut(rng)).first;
      }
      next.push_back(mutate(child, config.mutation_rate, rng()));
    }
    population = std::move(next);
    scores = std::move(next_scores);
    evaluate();
    record();
  }
  return out;
}

}  // namespace nidwca
