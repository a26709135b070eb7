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

#include "nidwca/config.hpp"

#include <limits>
#include <set>
#include <string>

#include "nidwca/serialize.hpp"

namespace nidwca {

using nlohmann::json;

namespace {

// Reads an optional member of `obj`, rejecting keys outside `allowed`.
class Section {
 public:
  Section(const json& obj, std::string path, std::set<std::string> allowed)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "must be an object");
    for (const auto& [key, value] : obj_.items()) {
      if (!allowed.count(key)) fail(join(key), "is not a known setting");
    }
  }

  template <typename T>
  void read(const char* key, T& out) const {
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) fail(join(key), "must be a number");
    } else {
      const bool non_negative =
          it->is_number_unsigned() ||
          (it->is_number_integer() && it->template get<std::int64_t>() >= 0);
      if (!non_negative || it->template get<std::uint64_t>() >
                               static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
        fail(join(key), "must be a non-negative integer in range");
      }
    }
    out = it->template get<T>();
  }

  const json* child(const char* key) const {
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::kConfig, "config " + (where.empty() ? "document" : where) + " " + what);
  }

 private:
  const json& obj_;
  std::string path_;
};

}  // namespace

void RunConfig::set_seed(std::uint64_t seed) {
  tree.ga.seed = seed;
  plan.seed = seed;
}

void RunConfig::validate() const {
  tree.validate();
  plan.validate();
}

std::string_view mode_name(DatasetMode m) {
  return m == DatasetMode::kLabeled ? "labeled" : "unlabeled";
}

DatasetMode parse_mode(std::string_view name) {
  if (name == "labeled") return DatasetMode::kLabeled;
  if (name == "unlabeled") return DatasetMode::kUnlabeled;
  throw Error(ErrorKind::kConfig, "mode must be 'labeled' or 'unlabeled', got '" +
                                      std::string(name) + "'");
}

json config_to_json(const RunConfig& c) {
  const GaConfig& ga = c.tree.ga;
  const EvolutionParams& ev = c.tree.evolution;
  json classifiers = json::array();
  for (const ClassifierTarget& t : c.plan.targets) {
    json positives = json::array();
    for (AttackCategory a : t.positives) positives.push_back(category_name(a));
    classifiers.push_back({{"name", t.name}, {"positives", positives}});
  }
  return {
      {"seed", c.seed()},
      {"mode", mode_name(c.tree.mode)},
      {"tree",
       {{"impurity_threshold", round_sig9(c.tree.impurity_threshold)},
        {"min_split", c.tree.min_split},
        {"max_depth", c.tree.max_depth}}},
      {"ga",
       {{"population_size", ga.population_size},
        {"generations", ga.generations},
        {"crossover_rate", round_sig9(ga.crossover_rate)},
        {"mutation_rate", round_sig9(ga.mutation_rate)},
        {"elitism_count", ga.elitism_count},
        {"tournament_size", ga.tournament_size},
        {"target_basins", ga.target_basins_k},
        {"penalty_weight", round_sig9(ga.basin_penalty_weight)}}},
      {"evolution",
       {{"max_steps", ev.max_steps},
        {"quantization_eps", round_sig9(ev.quantization_eps)},
        {"max_cycle_len", ev.max_cycle_len}}},
      {"classifiers", classifiers},
  };
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  const Section root(doc, "", {"seed", "mode", "tree", "ga", "evolution", "classifiers"});
  std::uint64_t seed = 0;
  root.read("seed", seed);
  c.set_seed(seed);
  if (const json* m = root.child("mode")) {
    if (!m->is_string()) Section::fail("mode", "must be a string");
    c.tree.mode = parse_mode(m->get<std::string>());
  }
  if (const json* t = root.child("tree")) {
    const Section s(*t, "tree", {"impurity_threshold", "min_split", "max_depth"});
    s.read("impurity_threshold", c.tree.impurity_threshold);
    s.read("min_split", c.tree.min_split);
    s.read("max_depth", c.tree.max_depth);
  }
  if (const json* g = root.child("ga")) {
    const Section s(*g, "ga",
                    {"population_size", "generations", "crossover_rate", "mutation_rate",
                     "elitism_count", "tournament_size", "target_basins", "penalty_weight"});
    GaConfig& ga = c.tree.ga;
    s.read("population_size", ga.population_size);
    s.read("generations", ga.generations);
    s.read("crossover_rate", ga.crossover_rate);
    s.read("mutation_rate", ga.mutation_rate);
    s.read("elitism_count", ga.elitism_count);
    s.read("tournament_size", ga.tournament_size);
    s.read("target_basins", ga.target_basins_k);
    s.read("penalty_weight", ga.basin_penalty_weight);
  }
  if (const json* e = root.child("evolution")) {
    const Section s(*e, "evolution", {"max_steps", "quantization_eps", "max_cycle_len"});
    EvolutionParams& ev = c.tree.evolution;
    s.read("max_steps", ev.max_steps);
    s.read("quantization_eps", ev.quantization_eps);
    s.read("max_cycle_len", ev.max_cycle_len);
  }
  if (const json* list = root.child("classifiers")) {
    if (!list->is_array()) Section::fail("classifiers", "must be an array");
    c.plan.targets.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string where = "classifiers[" + std::to_string(i) + "]";
      const json& item = (*list)[i];
      const Section s(item, where, {"name", "positives"});
      ClassifierTarget t;
      const json* name = s.child("name");
      const json* pos = s.child("positives");
      if (!name || !name->is_string()) Section::fail(where + ".name", "must be a string");
      if (!pos || !pos->is_array()) Section::fail(where + ".positives", "must be an array");
      t.name = name->get<std::string>();
      for (const json& p : *pos) {
        if (!p.is_string()) Section::fail(where + ".positives", "must hold category names");
        try {
          t.positives.push_back(parse_category(p.get<std::string>()));
        } catch (const Error& err) {
          Section::fail(where + ".positives", err.what());
        }
      }
      c.plan.targets.push_back(std::move(t));
    }
  }
  try {
    c.validate();
  } catch (const Error& err) {
    throw Error(ErrorKind::kConfig, err.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace nidwca
