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

#include "nidwca/fca.hpp"

#include <cstdlib>
#include <sstream>

namespace nidwca {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownRule: return "unknown-rule";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kMixedLabels: return "mixed-labels";
    case ErrorKind::kMode: return "mode";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kUnknownLabel: return "unknown-label";
    case ErrorKind::kMissingCategory: return "missing-category";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kVersionMismatch: return "version-mismatch";
    case ErrorKind::kCorruptFile: return "corrupt-file";
    case ErrorKind::kSchema: return "schema";
  }
  return "error";
}

std::vector<RuleId> rule_alphabet() {
  std::vector<RuleId> out;
  out.reserve(2 * kRuleCodes.size());
  for (int code : kRuleCodes) {
    out.emplace_back(code, false);
    out.emplace_back(code, true);
  }
  return out;
}

void EvolutionParams::validate() const {
  if (max_steps < 1) throw Error(ErrorKind::kConfig, "evolution.max_steps must be positive");
  if (!(quantization_eps > 0.0 && quantization_eps < 1.0)) {
    throw Error(ErrorKind::kConfig, "evolution.quantization_eps must lie in (0,1)");
  }
  if (max_cycle_len < 1 || max_cycle_len > max_steps) {
    throw Error(ErrorKind::kConfig, "evolution.max_cycle_len must lie in [1, max_steps]");
  }
}

std::int64_t fingerprint_distance(const BasinId& a, const BasinId& b) {
  if (a.fingerprint.size() != b.fingerprint.size()) {
    throw Error(ErrorKind::kDimension, "fingerprints of different width");
  }
  std::int64_t d = 0;
  for (std::size_t i = 0; i < a.fingerprint.size(); ++i) {
    d += std::llabs(static_cast<std::int64_t>(a.fingerprint[i]) - b.fingerprint[i]);
  }
  return d;
}

std::string to_string(const RuleVector& rules) {
  std::ostringstream os;
  os << '<';
  for (std::size_t i = 0; i < rules.rules().size(); ++i) {
    if (i) os << ',';
    os << rules[i].wolfram();
  }
  os << '>';
  return os.str();
}

std::string format_dependency_matrix(const DependencyMatrix& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace nidwca
