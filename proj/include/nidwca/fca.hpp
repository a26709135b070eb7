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

// Fuzzy cellular automaton engine: 1-D, 3-neighbourhood, null boundary,
// hybrid (per-cell) rules drawn from a closed Wolfram-style alphabet.
//
// Cell states live in [0,1]. Connectives are OR(a,b) = min(1, a+b) and
// NOT(a) = 1-a, so a non-complemented rule is a 0/1 row of the dependency
// matrix followed by clipping at 1, and its complement is one minus that.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <compare>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nidwca/error.hpp"

namespace nidwca {

template <typename Scalar>
using FuzzyState = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// 0/1 neighbour-dependence matrix, row i = cells read by rule i.
using DependencyMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Non-complemented rule codes. The complemented variant of code c is 255-c.
inline constexpr std::array<int, 8> kRuleCodes = {0,   170, 204, 238,
                                                  240, 250, 252, 254};

/// Which of (left, self, right) a rule code reads.
struct Neighbourhood {
  bool left = false;
  bool self = false;
  bool right = false;
};

/// Neighbour mask for a base (non-complemented) code; nullopt if unknown.
constexpr std::optional<Neighbourhood> neighbourhood_of(int base_code) {
  switch (base_code) {
    case 0:   return Neighbourhood{false, false, false};
    case 170: return Neighbourhood{false, false, true};
    case 204: return Neighbourhood{false, true, false};
    case 238: return Neighbourhood{false, true, true};
    case 240: return Neighbourhood{true, false, false};
    case 250: return Neighbourhood{true, false, true};
    case 252: return Neighbourhood{true, true, false};
    case 254: return Neighbourhood{true, true, true};
    default:  return std::nullopt;
  }
}

class RuleId {
 public:
  /// Base code must be a member of kRuleCodes.
  RuleId(int base_code, bool complemented) : code_(base_code), complemented_(complemented) {
    if (!neighbourhood_of(base_code)) {
      throw Error(ErrorKind::kUnknownRule,
                  "unknown rule code " + std::to_string(base_code));
    }
  }

  /// Accepts either column of the rule table: 238 or its complement 17.
  static RuleId from_wolfram(int wolfram_code) {
    if (neighbourhood_of(wolfram_code)) return RuleId(wolfram_code, false);
    if (wolfram_code >= 0 && wolfram_code <= 255 &&
        neighbourhood_of(255 - wolfram_code)) {
      return RuleId(255 - wolfram_code, true);
    }
    throw Error(ErrorKind::kUnknownRule,
                "unknown rule code " + std::to_string(wolfram_code));
  }

  int code() const { return code_; }
  bool complemented() const { return complemented_; }
  int wolfram() const { return complemented_ ? 255 - code_ : code_; }
  Neighbourhood reads() const { return *neighbourhood_of(code_); }

  auto operator<=>(const RuleId&) const = default;

 private:
  int code_;
  bool complemented_;
};

/// All 16 members of the alphabet, ordered (code, complemented).
std::vector<RuleId> rule_alphabet();

/// Hybrid rule assignment with null boundary, one rule per cell.
class RuleVector {
 public:
  explicit RuleVector(std::vector<RuleId> rules) : rules_(std::move(rules)) {
    if (rules_.empty()) {
      throw Error(ErrorKind::kDimension, "rule vector needs at least one cell");
    }
  }

  static RuleVector from_wolfram(const std::vector<int>& codes) {
    std::vector<RuleId> rules;
    rules.reserve(codes.size());
    for (int c : codes) rules.push_back(RuleId::from_wolfram(c));
    return RuleVector(std::move(rules));
  }

  Eigen::Index n_cells() const { return static_cast<Eigen::Index>(rules_.size()); }
  const std::vector<RuleId>& rules() const { return rules_; }
  const RuleId& operator[](std::size_t i) const { return rules_[i]; }

  bool operator==(const RuleVector&) const = default;

 private:
  std::vector<RuleId> rules_;
};

/// Next state of one cell. Absent neighbours at the boundary are passed as 0.
template <typename Scalar>
Scalar rule_next_state(const RuleId& rule, Scalar left, Scalar self, Scalar right) {
  const Neighbourhood n = rule.reads();
  Scalar sum(0);
  if (n.left) sum += left;
  if (n.self) sum += self;
  if (n.right) sum += right;
  const Scalar clipped = sum < Scalar(1) ? sum : Scalar(1);
  return rule.complemented() ? Scalar(1) - clipped : clipped;
}

inline DependencyMatrix build_dependency_matrix(const RuleVector& rules) {
  const Eigen::Index n = rules.n_cells();
  DependencyMatrix m = DependencyMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Neighbourhood r = rules[static_cast<std::size_t>(i)].reads();
    if (r.left && i > 0) m(i, i - 1) = 1;
    if (r.self) m(i, i) = 1;
    if (r.right && i + 1 < n) m(i, i + 1) = 1;
  }
  return m;
}

/// Per-cell coefficient arrays for a rule vector, so that a synchronous step
/// is a banded weighted sum, a clip and a conditional complement.
template <typename Scalar>
class CompiledRules {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  explicit CompiledRules(const RuleVector& rules)
      : left_(rules.n_cells()), self_(rules.n_cells()), right_(rules.n_cells()),
        flip_(rules.n_cells()) {
    for (Eigen::Index i = 0; i < rules.n_cells(); ++i) {
      const RuleId& r = rules[static_cast<std::size_t>(i)];
      const Neighbourhood nb = r.reads();
      left_[i] = nb.left ? Scalar(1) : Scalar(0);
      self_[i] = nb.self ? Scalar(1) : Scalar(0);
      right_[i] = nb.right ? Scalar(1) : Scalar(0);
      flip_[i] = r.complemented() ? Scalar(1) : Scalar(0);
    }
  }

  Eigen::Index n_cells() const { return self_.size(); }

  /// out = step(in); out must not alias in.
  void apply(Eigen::Ref<const FuzzyState<Scalar>> in, Eigen::Ref<FuzzyState<Scalar>> out) const {
    const Eigen::Index n = n_cells();
    if (in.size() != n || out.size() != n) {
      throw Error(ErrorKind::kDimension,
                  "state has " + std::to_string(in.size()) + " cells, rules have " +
                      std::to_string(n));
    }
    auto sum = out.array();
    sum = self_ * in.array();
    if (n > 1) {
      sum.tail(n - 1) += left_.tail(n - 1) * in.array().head(n - 1);
      sum.head(n - 1) += right_.head(n - 1) * in.array().tail(n - 1);
    }
    // complement: c + (1 - 2c) * min(1, sum)
    sum = flip_ + (Scalar(1) - Scalar(2) * flip_) * sum.min(Scalar(1));
  }

 private:
  Array left_, self_, right_, flip_;
};

template <typename Scalar>
FuzzyState<Scalar> step(const FuzzyState<Scalar>& state, const RuleVector& rules) {
  if (state.size() != rules.n_cells()) {
    throw Error(ErrorKind::kDimension,
                "state has " + std::to_string(state.size()) + " cells, rules have " +
                    std::to_string(rules.n_cells()));
  }
  FuzzyState<Scalar> out(state.size());
  CompiledRules<Scalar>(rules).apply(state, out);
  return out;
}

struct EvolutionParams {
  int max_steps = 64;
  double quantization_eps = 1.0 / 16.0;
  int max_cycle_len = 16;

  /// Throws kConfig on a violated invariant.
  void validate() const;
  bool operator==(const EvolutionParams&) const = default;
};

template <typename Scalar>
struct AttractorResult {
  FuzzyState<Scalar> attractor_state;
  int cycle_length = 1;
  int transient_length = 0;
  bool truncated = false;
};

/// Quantized attractor signature. The default-constructed value (empty
/// fingerprint, cycle length 0) is the reserved overflow basin.
struct BasinId {
  std::vector<std::int32_t> fingerprint;
  int cycle_length = 0;

  static BasinId overflow() { return BasinId{}; }
  bool is_overflow() const { return fingerprint.empty() && cycle_length == 0; }

  auto operator<=>(const BasinId&) const = default;
  bool operator==(const BasinId&) const = default;
};

struct BasinIdHash {
  std::size_t operator()(const BasinId& b) const noexcept {
    std::size_t h = static_cast<std::size_t>(b.cycle_length) * 0x9e3779b97f4a7c15ULL;
    for (std::int32_t v : b.fingerprint) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ULL +
           (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Writes round(x_i / eps) into `out` and returns a hash of the result.
template <typename Derived>
std::size_t quantize(const Eigen::MatrixBase<Derived>& state, double eps, std::int32_t* out) {
  // cell values are non-negative, so truncating x/eps + 1/2 rounds half up
  const double inv = 1.0 / eps;
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const auto q = static_cast<std::int32_t>(static_cast<double>(state[i]) * inv + 0.5);
    out[i] = q;
    h = (h ^ static_cast<std::uint32_t>(q)) * 0x100000001b3ULL;
  }
  return h;
}

/// Iterates `rules` from `state` until a quantized state repeats. Cycles longer
/// than max_cycle_len, and runs that exhaust max_steps, come back truncated.
template <typename Scalar>
AttractorResult<Scalar> evolve_to_attractor(const CompiledRules<Scalar>& rules,
                                            const FuzzyState<Scalar>& state,
                                            const EvolutionParams& params) {
  const Eigen::Index n = rules.n_cells();
  if (state.size() != n) {
    throw Error(ErrorKind::kDimension,
                "state has " + std::to_string(state.size()) + " cells, rules have " +
                    std::to_string(n));
  }
  const int max_steps = params.max_steps;
  const auto width = static_cast<std::size_t>(n);

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> trajectory(n, max_steps + 1);
  std::vector<std::int32_t> prints(width * static_cast<std::size_t>(max_steps + 1));
  std::vector<std::size_t> hashes(static_cast<std::size_t>(max_steps + 1));

  trajectory.col(0) = state;
  for (int t = 0;; ++t) {
    std::int32_t* fp = prints.data() + width * static_cast<std::size_t>(t);
    const std::size_t h = quantize(trajectory.col(t), params.quantization_eps, fp);
    for (int j = 0; j < t; ++j) {
      if (hashes[static_cast<std::size_t>(j)] != h) continue;
      const std::int32_t* earlier = prints.data() + width * static_cast<std::size_t>(j);
      if (!std::equal(fp, fp + width, earlier)) continue;
      AttractorResult<Scalar> r;
      r.cycle_length = t - j;
      r.transient_length = j;
      r.attractor_state = trajectory.col(j);
      if (r.cycle_length > params.max_cycle_len) {
        r.truncated = true;
        r.cycle_length = 1;
        r.transient_length = t;
        r.attractor_state = trajectory.col(t);
      }
      return r;
    }
    if (t == max_steps) {
      AttractorResult<Scalar> r;
      r.attractor_state = trajectory.col(t);
      r.cycle_length = 1;
      r.transient_length = t;
      r.truncated = true;
      return r;
    }
    hashes[static_cast<std::size_t>(t)] = h;
    rules.apply(trajectory.col(t), trajectory.col(t + 1));
  }
}

template <typename Scalar>
AttractorResult<Scalar> evolve_to_attractor(const FuzzyState<Scalar>& state,
                                            const RuleVector& rules,
                                            const EvolutionParams& params) {
  return evolve_to_attractor(CompiledRules<Scalar>(rules), state, params);
}

template <typename Scalar>
BasinId basin_fingerprint(const AttractorResult<Scalar>& result, const EvolutionParams& params) {
  if (result.truncated) return BasinId::overflow();
  BasinId id;
  id.fingerprint.resize(static_cast<std::size_t>(result.attractor_state.size()));
  quantize(result.attractor_state, params.quantization_eps, id.fingerprint.data());
  id.cycle_length = result.cycle_length;
  return id;
}

/// L1 distance between two basin fingerprints of equal width.
std::int64_t fingerprint_distance(const BasinId& a, const BasinId& b);

std::string to_string(const RuleVector& rules);
std::string format_dependency_matrix(const DependencyMatrix& m);

}  // namespace nidwca
