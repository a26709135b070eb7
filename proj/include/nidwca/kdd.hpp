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

// KDD Cup 99 connection records: parsing, min-max / rank fuzzification into
// one cell per feature, attack taxonomy, and a synthetic two-cluster fixture.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nidwca/types.hpp"

namespace nidwca {

inline constexpr std::size_t kFeatureCount = 41;

/// Feature names in file order.
extern const std::array<std::string_view, kFeatureCount> kFeatureNames;

/// protocol_type, service, flag.
inline constexpr std::array<std::size_t, 3> kCategoricalFeatures = {1, 2, 3};

bool is_categorical(std::size_t feature);

enum class AttackCategory { kNormal, kDoS, kProbe, kR2L, kU2R };

std::string_view category_name(AttackCategory c);
/// Inverse of category_name ("Normal", "DoS", ...); kUnknownLabel on failure.
AttackCategory parse_category(std::string_view name);

class Taxonomy {
 public:
  /// The bundled KDD Cup 99 table.
  static const Taxonomy& bundled();
  /// Two whitespace-separated columns per line: label category. '#' comments.
  static Taxonomy parse(std::string_view text);
  static Taxonomy load(const std::string& path);

  /// Label without the trailing dot. Throws kUnknownLabel.
  AttackCategory category(std::string_view label) const;
  const std::map<std::string, AttackCategory, std::less<>>& entries() const { return entries_; }

  /// Canonical text form (sorted, one "label category" per line).
  std::string canonical_text() const;
  std::string digest() const;

 private:
  std::map<std::string, AttackCategory, std::less<>> entries_;
};

/// Bundled table as shipped in data/kdd_taxonomy.txt.
extern const std::string_view kBundledTaxonomyText;

AttackCategory label_category(std::string_view label,
                              const Taxonomy& taxonomy = Taxonomy::bundled());

struct ConnectionRecord {
  /// Numeric features; categorical slots hold 0.
  std::array<double, kFeatureCount> numeric{};
  /// protocol_type, service, flag.
  std::array<std::string, 3> categorical;
  /// Label without the trailing dot.
  std::optional<std::string> label;
  std::optional<AttackCategory> category;

  bool operator==(const ConnectionRecord&) const = default;
};

enum class LabelPresence { kLabeled, kUnlabeled, kAuto };

/// Parses one comma-separated line. `line_number` is only used in messages.
ConnectionRecord parse_record(std::string_view line, LabelPresence labels,
                              const Taxonomy& taxonomy = Taxonomy::bundled(),
                              std::size_t line_number = 0);

/// Reads every non-blank line of `in`.
std::vector<ConnectionRecord> read_records(std::istream& in, LabelPresence labels,
                                           const Taxonomy& taxonomy = Taxonomy::bundled());

struct NumericRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const NumericRange&) const = default;
};

struct Normalizer {
  /// Indexed by feature; entries for categorical features are unused.
  std::array<NumericRange, kFeatureCount> ranges{};
  /// Sorted distinct values per categorical feature.
  std::array<std::vector<std::string>, 3> categories;

  bool operator==(const Normalizer&) const = default;
};

Normalizer fit_normalizer(const std::vector<ConnectionRecord>& records);

/// Min-max scaling clamped to [0,1]; categorical rank / (card-1); categories
/// not seen at fit time map to 1.
State fuzzify(const ConnectionRecord& record, const Normalizer& norm);

struct SyntheticSpec {
  std::size_t n_normal = 500;
  std::size_t n_attack = 500;
  State center_normal = State::Constant(kFeatureCount, 0.25);
  State center_attack = State::Constant(kFeatureCount, 0.75);
  double spread = 0.05;
  std::uint64_t seed = 0;
};

/// Normal points first, then attack points; uniform noise of +-spread per
/// component, clamped to [0,1].
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Renders fuzzy samples as KDD-format lines so the CLI can consume them.
/// Categorical cells are snapped onto small sorted vocabularies.
void write_kdd_lines(const Dataset& data, std::ostream& out,
                     std::string_view attack_label = "smurf");

}  // namespace nidwca
