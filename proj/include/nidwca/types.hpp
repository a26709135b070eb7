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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "nidwca/fca.hpp"

namespace nidwca {

using State = FuzzyState<double>;

enum class Label { kNormal, kAttack };

std::string_view label_name(Label l);

/// One fuzzified record; `label` is empty in unlabeled data.
struct Sample {
  State state;
  std::optional<Label> label;
};

using Dataset = std::vector<Sample>;

enum class DatasetMode { kLabeled, kUnlabeled };

/// Labeled if every sample carries a label, unlabeled if none does. Throws
/// kEmptyInput / kMixedLabels otherwise.
DatasetMode dataset_mode(const Dataset& data);

/// Mixes several integers into one seed. Independent of call order elsewhere,
/// so sub-seeds can be derived per (generation, index) or per tree position.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(parts.size() * 2);
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace nidwca
