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

#include "nidwca/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

#include "nidwca/parallel.hpp"
#include "nidwca/serialize.hpp"

namespace nidwca {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::kDimension, std::string(what) + ": " + std::to_string(a) + " vs " +
                                           std::to_string(b) + " entries");
  }
}

bool valid_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_';
  });
}

}  // namespace

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  check_lengths(predictions.size(), truths.size(), "predictions and truths differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool p = predictions[i] == Label::kAttack;
    if (truths[i] == Label::kAttack) {
      ++(p ? c.tp : c.fn);
    } else {
      ++(p ? c.fp : c.tn);
    }
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  return {ratio(c.tp, c.tp + c.fn), ratio(c.fp, c.fp + c.tn), ratio(c.tp, c.tp + c.fp),
          ratio(c.tp + c.tn, c.total())};
}

std::vector<double> default_grid() {
  std::vector<double> grid(101);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 100.0;
  return grid;
}

std::vector<CurvePoint> sweep_threshold(std::span<const double> scores,
                                        std::span<const Label> truths,
                                        std::span<const double> grid) {
  check_lengths(scores.size(), truths.size(), "scores and truths differ in length");
  if (grid.empty()) throw Error(ErrorKind::kRange, "threshold grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw Error(ErrorKind::kRange, "threshold grid must be ascending");
  }
  std::vector<CurvePoint> curve;
  curve.reserve(grid.size());
  std::vector<Label> predicted(scores.size());
  for (double t : grid) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      predicted[i] = scores[i] >= t ? Label::kAttack : Label::kNormal;
    }
    CurvePoint p;
    p.threshold = t;
    p.counts = confusion(predicted, truths);
    p.metrics = metrics(p.counts);
    curve.push_back(p);
  }
  return curve;
}

const CurvePoint& best_point(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw Error(ErrorKind::kEmptyInput, "curve has no points");
  const CurvePoint* best = &curve.front();
  auto gain = [](const CurvePoint& p) {
    return p.metrics.detection_rate - p.metrics.false_positive_rate;
  };
  for (const CurvePoint& p : curve) {
    if (gain(p) > gain(*best) || (gain(p) == gain(*best) && p.threshold < best->threshold)) {
      best = &p;
    }
  }
  return *best;
}

void ExperimentPlan::validate() const {
  if (targets.empty()) throw Error(ErrorKind::kConfig, "experiment plan has no classifiers");
  std::set<AttackCategory> used;
  std::set<std::string> names;
  for (const ClassifierTarget& t : targets) {
    if (!valid_name(t.name)) {
      throw Error(ErrorKind::kConfig, "classifier name '" + t.name +
                                          "' must be non-empty [A-Za-z0-9_-]");
    }
    if (!names.insert(t.name).second) {
      throw Error(ErrorKind::kConfig, "duplicate classifier name '" + t.name + "'");
    }
    if (t.positives.empty()) {
      throw Error(ErrorKind::kConfig, "classifier " + t.name + " has no positive categories");
    }
    for (AttackCategory c : t.positives) {
      if (c == AttackCategory::kNormal) {
        throw Error(ErrorKind::kConfig, "classifier " + t.name + " lists Normal as positive");
      }
      if (!used.insert(c).second) {
        throw Error(ErrorKind::kConfig, "category " + std::string(category_name(c)) +
                                            " appears in more than one classifier");
      }
    }
  }
}

ExperimentReport run_experiment(const std::vector<ConnectionRecord>& train,
                                const std::vector<ConnectionRecord>& test,
                                const ExperimentPlan& plan, const TreeConfig& tree,
                                std::size_t workers) {
  plan.validate();
  tree.validate();
  for (const auto* set : {&train, &test}) {
    for (const ConnectionRecord& r : *set) {
      if (!r.category) throw Error(ErrorKind::kMode, "experiments need labeled records");
    }
  }
  std::set<AttackCategory> present;
  for (const ConnectionRecord& r : train) present.insert(*r.category);
  for (const ClassifierTarget& t : plan.targets) {
    for (AttackCategory c : t.positives) {
      if (!present.count(c)) {
        throw Error(ErrorKind::kMissingCategory,
                    "classifier " + t.name + ": category " + std::string(category_name(c)) +
                        " is absent from the training data");
      }
    }
    if (!present.count(AttackCategory::kNormal)) {
      throw Error(ErrorKind::kMissingCategory,
                  "classifier " + t.name + ": category Normal is absent from the training data");
    }
  }

  const std::size_t total = resolve_workers(workers);
  const std::size_t outer = std::min(total, plan.targets.size());
  const std::size_t inner = std::max<std::size_t>(1, total / outer);

  ExperimentReport report;
  report.classifiers.resize(plan.targets.size());
  parallel_for(plan.targets.size(), outer, [&](std::size_t k) {
    const ClassifierTarget& target = plan.targets[k];
    auto wanted = [&](const ConnectionRecord& r) {
      return *r.category == AttackCategory::kNormal ||
             std::find(target.positives.begin(), target.positives.end(), *r.category) !=
                 target.positives.end();
    };
    std::vector<ConnectionRecord> tr, te;
    std::copy_if(train.begin(), train.end(), std::back_inserter(tr), wanted);
    std::copy_if(test.begin(), test.end(), std::back_inserter(te), wanted);

    ClassifierResult& out = report.classifiers[k];
    out.name = target.name;
    out.train_records = tr.size();
    out.test_records = te.size();
    out.normalizer = fit_normalizer(tr);
    auto relabel = [](const ConnectionRecord& r) {
      return r.category == AttackCategory::kNormal ? Label::kNormal : Label::kAttack;
    };
    Dataset data;
    data.reserve(tr.size());
    for (const ConnectionRecord& r : tr) data.push_back({fuzzify(r, out.normalizer), relabel(r)});

    TreeConfig cfg = tree;
    cfg.ga.seed = derive_seed({plan.seed, k});
    cfg.ga.workers = inner;
    const auto start = std::chrono::steady_clock::now();
    out.tree = build_tree(data, cfg);
    out.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<double> scores(te.size());
    std::vector<Label> truths(te.size());
    parallel_for(te.size(), inner, [&](std::size_t i) {
      scores[i] = classify(fuzzify(te[i], out.normalizer), out.tree).score;
      truths[i] = relabel(te[i]);
    });
    const std::vector<double> grid = default_grid();
    out.curve = sweep_threshold(scores, truths, grid);
  });
  return report;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "threshold,detection_rate,false_positive_rate,precision,accuracy\n";
  char row[160];
  for (const CurvePoint& p : curve) {
    std::snprintf(row, sizeof row, "%.6f,%.6f,%.6f,%.6f,%.6f\n", p.threshold,
                  p.metrics.detection_rate, p.metrics.false_positive_rate, p.metrics.precision,
                  p.metrics.accuracy);
    out += row;
  }
  return out;
}

nlohmann::json summary_json(const ExperimentReport& report) {
  nlohmann::json classifiers = nlohmann::json::array();
  for (const ClassifierResult& c : report.classifiers) {
    const CurvePoint& b = best_point(c.curve);
    classifiers.push_back({
        {"name", c.name},
        {"train_seconds", round_sig9(c.train_seconds)},
        {"curve_file", c.name + ".csv"},
        {"best",
         {{"threshold", round_sig9(b.threshold)},
          {"detection_rate", round_sig9(b.metrics.detection_rate)},
          {"false_positive_rate", round_sig9(b.metrics.false_positive_rate)}}},
    });
  }
  return {{"config", report.config},
          {"input_digests", report.input_digests},
          {"classifiers", classifiers}};
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorKind::kIo, "cannot create report directory '" + out_dir.string() + "'");
  }
  const std::string summary = dump_canonical(summary_json(report));
  for (const ClassifierResult& c : report.classifiers) {
    write_file(out_dir / (c.name + ".csv"), curve_csv(c.curve));
  }
  write_file(out_dir / "summary.json", summary);
}

}  // namespace nidwca
