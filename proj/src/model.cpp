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

#include "nidwca/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "nidwca/serialize.hpp"

namespace nidwca {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::kSchema, "model " + where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema(where, std::string("missing '") + key + "'");
  return *it;
}

std::uint64_t uint_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    schema(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double real_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number()) schema(where + "." + key, "expected a number");
  return v.get<double>();
}

std::string string_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) schema(where + "." + key, "expected a string");
  return v.get<std::string>();
}

const json& array_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_array()) schema(where + "." + key, "expected an array");
  return v;
}

json node_to_json(const TreeNode& node) {
  json rules = json::array();
  for (const RuleId& r : node.chromosome.rules()) {
    rules.push_back({{"code", r.code()}, {"complement", r.complemented()}});
  }
  json basins = json::array();
  for (const auto& [id, st] : node.basins) {
    json b = {{"fingerprint", id.fingerprint},
              {"cycle_length", id.cycle_length},
              {"n_total", st.n_total},
              {"n_attack", st.n_attack},
              {"r_q", round_sig9(st.r_q)}};
    if (const TreeNode* c = node.child(id)) b["child"] = node_to_json(*c);
    basins.push_back(std::move(b));
  }
  return {{"depth", node.depth},
          {"mode", mode_name(node.mode)},
          {"evolution",
           {{"max_steps", node.evolution.max_steps},
            {"quantization_eps", round_sig9(node.evolution.quantization_eps)},
            {"max_cycle_len", node.evolution.max_cycle_len}}},
          {"rules", rules},
          {"feature_order", node.feature_order},
          {"basins", basins}};
}

// `width` is the lattice width fixed by the root; 0 while reading the root.
TreeNode node_from_json(const json& doc, const std::string& where, std::size_t depth,
                        DatasetMode mode, std::size_t width) {
  TreeNode node;
  node.depth = uint_member(doc, "depth", where);
  if (node.depth != depth) schema(where + ".depth", "does not match nesting level");
  try {
    node.mode = parse_mode(string_member(doc, "mode", where));
  } catch (const Error& e) {
    schema(where + ".mode", e.what());
  }
  if (node.mode != mode) schema(where + ".mode", "differs from the model mode");

  const json& ev = member(doc, "evolution", where);
  const std::string ev_where = where + ".evolution";
  const std::uint64_t max_steps = uint_member(ev, "max_steps", ev_where);
  const std::uint64_t max_cycle = uint_member(ev, "max_cycle_len", ev_where);
  if (max_steps > 1u << 30 || max_cycle > 1u << 30) schema(ev_where, "value out of range");
  node.evolution.max_steps = static_cast<int>(max_steps);
  node.evolution.max_cycle_len = static_cast<int>(max_cycle);
  node.evolution.quantization_eps = real_member(ev, "quantization_eps", ev_where);
  try {
    node.evolution.validate();
  } catch (const Error& e) {
    schema(ev_where, e.what());
  }

  std::vector<RuleId> rules;
  const json& rule_list = array_member(doc, "rules", where);
  for (std::size_t i = 0; i < rule_list.size(); ++i) {
    const std::string rw = where + ".rules[" + std::to_string(i) + "]";
    const json& complement = member(rule_list[i], "complement", rw);
    if (!complement.is_boolean()) schema(rw + ".complement", "expected a boolean");
    try {
      rules.emplace_back(static_cast<int>(uint_member(rule_list[i], "code", rw)),
                         complement.get<bool>());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kSchema) throw;
      schema(rw, e.what());
    }
  }
  if (rules.empty() || (width != 0 && rules.size() != width)) {
    schema(where + ".rules", "lattice width differs from the root node");
  }
  width = rules.size();
  node.chromosome = RuleVector(std::move(rules));

  const json& order = array_member(doc, "feature_order", where);
  std::vector<bool> seen(width, false);
  for (const json& f : order) {
    if (!f.is_number_integer() || f.get<std::int64_t>() < 0 ||
        f.get<std::uint64_t>() >= width ||
        seen[f.get<std::size_t>()]) {
      schema(where + ".feature_order", "is not a permutation of the features");
    }
    seen[f.get<std::size_t>()] = true;
    node.feature_order.push_back(f.get<std::size_t>());
  }
  if (node.feature_order.size() != width) {
    schema(where + ".feature_order", "is not a permutation of the features");
  }

  const json& basins = array_member(doc, "basins", where);
  if (basins.empty()) schema(where + ".basins", "is empty");
  std::vector<std::pair<BasinId, const json*>> kids;
  for (std::size_t i = 0; i < basins.size(); ++i) {
    const std::string bw = where + ".basins[" + std::to_string(i) + "]";
    const json& b = basins[i];
    BasinStats st;
    const json& fp = array_member(b, "fingerprint", bw);
    for (const json& v : fp) {
      if (!v.is_number_integer()) schema(bw + ".fingerprint", "expected integers");
      st.basin.fingerprint.push_back(v.get<std::int32_t>());
    }
    const std::uint64_t cycle = uint_member(b, "cycle_length", bw);
    if (cycle > 1u << 30) schema(bw + ".cycle_length", "out of range");
    st.basin.cycle_length = static_cast<int>(cycle);
    if (!st.basin.is_overflow() &&
        (st.basin.fingerprint.size() != width || st.basin.cycle_length < 1)) {
      schema(bw, "fingerprint does not match the lattice width");
    }
    st.n_total = uint_member(b, "n_total", bw);
    st.n_attack = uint_member(b, "n_attack", bw);
    if (st.n_total == 0 || st.n_attack > st.n_total) schema(bw, "inconsistent counts");
    if (mode == DatasetMode::kUnlabeled && st.n_attack != 0) {
      schema(bw, "unlabeled basins carry no attack counts");
    }
    st.r_q = real_member(b, "r_q", bw);
    if (!node.basins.emplace(st.basin, st).second) schema(bw, "duplicate basin");
    if (b.contains("child")) kids.emplace_back(st.basin, &b["child"]);
  }

  std::size_t largest = 0;
  for (const auto& [id, st] : node.basins) largest = std::max(largest, st.n_total);
  for (auto& [id, st] : node.basins) {
    const double r = mode == DatasetMode::kLabeled
                         ? static_cast<double>(st.n_attack) / static_cast<double>(st.n_total)
                         : 1.0 - static_cast<double>(st.n_total) / static_cast<double>(largest);
    if (std::abs(r - st.r_q) > 1e-8) schema(where, "r_q disagrees with basin counts");
    st.r_q = r;
    st.label = r >= 0.5 ? Label::kAttack : Label::kNormal;
  }
  for (const auto& [id, child] : kids) {
    node.child_index.emplace(id, node.children.size());
    node.children.push_back(
        node_from_json(*child, where + ".child", depth + 1, mode, width));
  }
  return node;
}

json normalizer_to_json(const Normalizer& n) {
  json numeric = json::object();
  json categories = json::object();
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const std::string name(kFeatureNames[f]);
    if (is_categorical(f)) continue;
    numeric[name] = {round_sig9(n.ranges[f].min), round_sig9(n.ranges[f].max)};
  }
  for (std::size_t c = 0; c < kCategoricalFeatures.size(); ++c) {
    categories[std::string(kFeatureNames[kCategoricalFeatures[c]])] = n.categories[c];
  }
  return {{"numeric", numeric}, {"categories", categories}};
}

Normalizer normalizer_from_json(const json& doc) {
  Normalizer n;
  const json& numeric = member(doc, "numeric", "normalizer");
  const json& categories = member(doc, "categories", "normalizer");
  if (!numeric.is_object() || numeric.size() != kFeatureCount - kCategoricalFeatures.size()) {
    schema("normalizer.numeric", "expected one range per numeric feature");
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const std::string name(kFeatureNames[f]);
    if (is_categorical(f)) {
      const json& list = array_member(categories, name.c_str(), "normalizer.categories");
      std::vector<std::string> vocab;
      for (const json& v : list) {
        if (!v.is_string()) schema("normalizer.categories." + name, "expected strings");
        vocab.push_back(v.get<std::string>());
      }
      if (vocab.empty() || !std::is_sorted(vocab.begin(), vocab.end()) ||
          std::adjacent_find(vocab.begin(), vocab.end()) != vocab.end()) {
        schema("normalizer.categories." + name, "expected a sorted, distinct, non-empty list");
      }
      n.categories[static_cast<std::size_t>(
          std::find(kCategoricalFeatures.begin(), kCategoricalFeatures.end(), f) -
          kCategoricalFeatures.begin())] = std::move(vocab);
      continue;
    }
    const json& range = array_member(numeric, name.c_str(), "normalizer.numeric");
    if (range.size() != 2 || !range[0].is_number() || !range[1].is_number() ||
        range[0].get<double>() > range[1].get<double>()) {
      schema("normalizer.numeric." + name, "expected [min, max]");
    }
    n.ranges[f] = {range[0].get<double>(), range[1].get<double>()};
  }
  if (categories.size() != kCategoricalFeatures.size()) {
    schema("normalizer.categories", "unexpected feature");
  }
  return n;
}

}  // namespace

json model_to_json(const Model& model) {
  return {{"format_version", kModelFormatVersion},
          {"mode", mode_name(model.mode())},
          {"seed", model.seed()},
          {"taxonomy_digest", model.taxonomy_digest},
          {"config", config_to_json(model.config)},
          {"normalizer", normalizer_to_json(model.normalizer)},
          {"tree", node_to_json(model.tree)}};
}

std::string serialize_model(const Model& model) { return dump_canonical(model_to_json(model)); }

Model parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptFile, std::string("model is not a complete JSON document: ") +
                                             e.what());
  }
  if (!doc.is_object()) schema("document", "expected an object");
  const json& version = member(doc, "format_version", "document");
  if (!version.is_number_integer()) schema("format_version", "expected an integer");
  if (version.get<std::int64_t>() != kModelFormatVersion) {
    throw Error(ErrorKind::kVersionMismatch,
                "model format_version " + version.dump() + " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> kKeys = {"format_version", "mode",   "seed",
                                                "taxonomy_digest", "config", "normalizer",
                                                "tree"};
    if (!kKeys.count(key)) schema("document", "unknown key '" + key + "'");
  }

  Model m;
  DatasetMode mode = DatasetMode::kLabeled;
  try {
    mode = parse_mode(string_member(doc, "mode", "document"));
    m.config = config_from_json(member(doc, "config", "document"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw;
    schema("config", e.what());
  }
  if (uint_member(doc, "seed", "document") != m.config.seed()) {
    schema("seed", "differs from the config seed");
  }
  if (m.config.tree.mode != mode) schema("mode", "differs from the config mode");
  m.taxonomy_digest = string_member(doc, "taxonomy_digest", "document");
  m.normalizer = normalizer_from_json(member(doc, "normalizer", "document"));
  m.tree = node_from_json(member(doc, "tree", "document"), "tree", 0, mode, 0);
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

Verdict classify_record(const ConnectionRecord& record, const Model& model, double threshold) {
  return classify(fuzzify(record, model.normalizer), model.tree, threshold);
}

}  // namespace nidwca
