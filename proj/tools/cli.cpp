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

#include "nidwca/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "nidwca/config.hpp"
#include "nidwca/digest.hpp"
#include "nidwca/eval.hpp"
#include "nidwca/model.hpp"
#include "nidwca/parallel.hpp"
#include "nidwca/serialize.hpp"

namespace nidwca {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data;
  std::string test;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string model;
  double threshold = 0.5;
  std::string mode;
  std::string taxonomy;
  // gen-synthetic
  std::size_t n_normal = 500;
  std::size_t n_attack = 500;
  double spread = 0.05;
  std::string attack_label = "smurf";
  bool unlabeled = false;
};

std::size_t worker_cap() {
  const char* env = std::getenv("NIDWCA_THREADS");
  if (!env || !*env) return resolve_workers(0);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || env[0] == '-') {
    throw UsageError("NIDWCA_THREADS must be a non-negative integer, got '" + std::string(env) +
                     "'");
  }
  return resolve_workers(static_cast<std::size_t>(v));
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string fixed6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.set_seed(*o.seed);
  if (!o.mode.empty()) cfg.tree.mode = parse_mode(o.mode);
  cfg.validate();
  return cfg;
}

Taxonomy resolve_taxonomy(const Options& o) {
  return o.taxonomy.empty() ? Taxonomy::bundled() : Taxonomy::load(o.taxonomy);
}

std::vector<ConnectionRecord> read_data(const std::string& path, const Taxonomy& taxonomy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open data file '" + path + "'");
  try {
    return read_records(in, LabelPresence::kAuto, taxonomy);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Label binary_label(const ConnectionRecord& r) {
  return r.category == AttackCategory::kNormal ? Label::kNormal : Label::kAttack;
}

int cmd_train(const Options& o, std::ostream& out) {
  const std::size_t workers = worker_cap();
  RunConfig cfg = resolve_config(o);
  const Taxonomy taxonomy = resolve_taxonomy(o);
  const auto records = read_data(o.data, taxonomy);
  Model m;
  m.config = cfg;
  m.taxonomy_digest = taxonomy.digest();
  m.normalizer = fit_normalizer(records);
  Dataset data;
  data.reserve(records.size());
  for (const ConnectionRecord& r : records) {
    if (cfg.tree.mode == DatasetMode::kLabeled && !r.category) {
      throw Error(ErrorKind::kMode, o.data + ": labeled training needs a label on every record");
    }
    data.push_back({fuzzify(r, m.normalizer),
                    r.category ? std::optional<Label>(binary_label(r)) : std::nullopt});
  }
  TreeConfig tree = cfg.tree;
  tree.ga.workers = workers;
  const auto start = std::chrono::steady_clock::now();
  m.tree = build_tree(data, tree);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_model(m, o.out);
  out << "wrote " << o.out << ": " << m.tree.node_count() << " nodes, " << m.tree.basins.size()
      << " root basins, trained on " << records.size() << " records in " << fixed6(secs)
      << " s\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const std::size_t workers = worker_cap();
  const Taxonomy taxonomy = resolve_taxonomy(o);
  const auto test = read_data(o.test, taxonomy);
  ExperimentReport report;
  report.input_digests["test"] = file_digest(o.test);
  report.input_digests["taxonomy"] = taxonomy.digest();
  if (!o.model.empty()) {
    const Model m = load_model(o.model);
    if (m.taxonomy_digest != taxonomy.digest()) {
      err << "warning: model was trained with taxonomy " << m.taxonomy_digest << "\n";
    }
    report.config = config_to_json(m.config);
    report.input_digests["model"] = file_digest(o.model);
    ClassifierResult c;
    c.name = "model";
    c.test_records = test.size();
    c.normalizer = m.normalizer;
    std::vector<double> scores;
    std::vector<Label> truths;
    for (const ConnectionRecord& r : test) {
      if (!r.category) throw Error(ErrorKind::kMode, o.test + ": evaluation needs labeled records");
      scores.push_back(classify_record(r, m, 0.5).score);
      truths.push_back(binary_label(r));
    }
    const std::vector<double> grid = default_grid();
    c.curve = sweep_threshold(scores, truths, grid);
    report.classifiers.push_back(std::move(c));
  } else {
    const RunConfig cfg = resolve_config(o);
    const auto train = read_data(o.data, taxonomy);
    report = run_experiment(train, test, cfg.plan, cfg.tree, workers);
    report.config = config_to_json(cfg);
    report.input_digests = {{"train", file_digest(o.data)},
                            {"test", file_digest(o.test)},
                            {"taxonomy", taxonomy.digest()}};
  }
  emit_report(report, o.out);
  for (const ClassifierResult& c : report.classifiers) {
    const CurvePoint& b = best_point(c.curve);
    out << c.name << ": threshold " << fixed6(b.threshold) << " detection_rate "
        << fixed6(b.metrics.detection_rate) << " false_positive_rate "
        << fixed6(b.metrics.false_positive_rate) << " train_seconds " << fixed6(c.train_seconds)
        << "\n";
  }
  return kExitOk;
}

int cmd_classify(const Options& o, std::istream& in, std::ostream& out) {
  const Model m = load_model(o.model);
  const Taxonomy taxonomy = resolve_taxonomy(o);
  std::ifstream file;
  std::istream* src = &in;
  if (!o.data.empty()) {
    file.open(o.data, std::ios::binary);
    if (!file) throw Error(ErrorKind::kIo, "cannot open data file '" + o.data + "'");
    src = &file;
  }
  std::string line;
  std::size_t n = 0;
  while (std::getline(*src, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const ConnectionRecord r = parse_record(line, LabelPresence::kAuto, taxonomy, n);
    const Verdict v = classify_record(r, m, o.threshold);
    out << label_name(v.label) << ',' << fixed6(v.score) << ',' << format_basin_path(v, m.tree)
        << '\n' << std::flush;
  }
  return kExitOk;
}

void inspect_node(const TreeNode& node, const std::string& path, std::ostream& out) {
  out << "node " << (path.empty() ? "root" : path) << " (depth " << node.depth << ")\n";
  out << "rules " << to_string(node.chromosome) << "\n";
  out << "feature order";
  for (std::size_t f : node.feature_order) out << ' ' << f;
  out << "\ndependency matrix\n" << format_dependency_matrix(build_dependency_matrix(node.chromosome));
  out << "basin n_total n_attack r_q label cycle child\n";
  std::size_t i = 0;
  for (const auto& [id, st] : node.basins) {
    out << i << ' ' << st.n_total << ' ' << st.n_attack << ' ' << fixed6(st.r_q) << ' '
        << label_name(st.label) << ' ' << (id.is_overflow() ? "overflow" : std::to_string(id.cycle_length))
        << ' ' << (node.child(id) ? "yes" : "-") << '\n';
    ++i;
  }
  i = 0;
  for (const auto& [id, st] : node.basins) {
    if (const TreeNode* c = node.child(id)) {
      out << '\n';
      inspect_node(*c, path.empty() ? std::to_string(i) : path + "/" + std::to_string(i), out);
    }
    ++i;
  }
}

int cmd_inspect(const Options& o, std::ostream& out) {
  const Model m = load_model(o.model);
  out << "format_version " << kModelFormatVersion << "\n"
      << "mode " << mode_name(m.mode()) << "\n"
      << "seed " << m.seed() << "\n"
      << "taxonomy " << m.taxonomy_digest << "\n"
      << "nodes " << m.tree.node_count() << "\n\n";
  inspect_node(m.tree, "", out);
  return kExitOk;
}

int cmd_gen_synthetic(const Options& o, std::ostream& out) {
  SyntheticSpec spec;
  spec.n_normal = o.n_normal;
  spec.n_attack = o.n_attack;
  spec.spread = o.spread;
  spec.seed = o.seed.value_or(0);
  Dataset d = generate_synthetic(spec);
  if (o.unlabeled) {
    for (Sample& s : d) s.label.reset();
  }
  label_category(o.attack_label);  // reject labels outside the taxonomy
  std::ostringstream text;
  write_kdd_lines(d, text, o.attack_label);
  if (o.out.empty()) {
    out << text.str();
  } else {
    write_file(o.out, text.str());
  }
  return kExitOk;
}

}  // namespace

std::string format_basin_path(const Verdict& verdict, const TreeNode& tree) {
  std::string path;
  const TreeNode* node = &tree;
  for (const PathStep& step : verdict.path) {
    if (!path.empty()) path += '/';
    const auto it = node ? node->basins.find(step.basin) : tree.basins.end();
    if (!node || it == node->basins.end()) {
      path += "new";
      break;
    }
    path += std::to_string(std::distance(node->basins.begin(), it));
    if (step.fallback) path += '*';
    node = node->child(step.basin);
  }
  return path;
}

int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Fuzzy cellular automata intrusion detection", "nidwca"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Train a basin tree and write a model file");
  train->add_option("--data", o.data, "Training records (KDD format)")->required();
  train->add_option("--config", o.config, "Run configuration (JSON)");
  train->add_option("--seed", o.seed, "Seed, overrides the config");
  train->add_option("--out", o.out, "Model file to write")->required();
  train->add_option("--mode", o.mode, "labeled|unlabeled")
      ->check(CLI::IsMember({"labeled", "unlabeled"}));
  train->add_option("--taxonomy", o.taxonomy, "Label taxonomy file");

  auto* eval = app.add_subcommand("evaluate", "Sweep detection curves and write a report dir");
  auto* eval_data = eval->add_option("--data", o.data, "Training records for the experiment");
  auto* eval_model = eval->add_option("--model", o.model, "Evaluate an existing model instead");
  eval_data->excludes(eval_model);
  eval->add_option("--test", o.test, "Held-out labeled records")->required();
  eval->add_option("--config", o.config, "Run configuration (JSON)")->excludes(eval_model);
  eval->add_option("--seed", o.seed, "Seed, overrides the config")->excludes(eval_model);
  eval->add_option("--out", o.out, "Report directory")->required();
  eval->add_option("--mode", o.mode, "labeled|unlabeled")
      ->check(CLI::IsMember({"labeled", "unlabeled"}))
      ->excludes(eval_model);
  eval->add_option("--taxonomy", o.taxonomy, "Label taxonomy file");

  auto* cls = app.add_subcommand("classify", "Print label,score,basin_path per record");
  cls->add_option("--model", o.model, "Model file")->required();
  cls->add_option("--data", o.data, "Records to classify (default: stdin)");
  cls->add_option("--threshold", o.threshold, "Attack iff score >= threshold")
      ->check(CLI::Range(0.0, 1.0));
  cls->add_option("--taxonomy", o.taxonomy, "Label taxonomy file");

  auto* inspect = app.add_subcommand("inspect", "Dump rules, dependency matrices and basins");
  inspect->add_option("--model", o.model, "Model file")->required();

  auto* gen = app.add_subcommand("gen-synthetic", "Write two-cluster records in KDD format");
  gen->add_option("--out", o.out, "Output file (default: stdout)");
  gen->add_option("--seed", o.seed, "Seed");
  gen->add_option("--normal", o.n_normal, "Normal records");
  gen->add_option("--attack", o.n_attack, "Attack records");
  gen->add_option("--spread", o.spread, "Uniform noise half-width")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--attack-label", o.attack_label, "Label written for attack records");
  gen->add_flag("--unlabeled", o.unlabeled, "Omit the label column");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (train->parsed()) return cmd_train(o, out);
    if (eval->parsed()) {
      if (o.data.empty() && o.model.empty()) {
        throw UsageError("evaluate needs --data (train a fresh experiment) or --model");
      }
      return cmd_evaluate(o, out, err);
    }
    if (cls->parsed()) return cmd_classify(o, in, out);
    if (inspect->parsed()) return cmd_inspect(o, out);
    return cmd_gen_synthetic(o, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << one_line(e.what()) << "\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error[usage]: " << one_line(e.what()) << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error[" << error_kind_name(e.kind()) << "]: " << one_line(e.what()) << "\n";
    return e.kind() == ErrorKind::kConfig ? kExitUsage : kExitDataError;
  } catch (const std::exception& e) {
    err << "error[internal]: " << one_line(e.what()) << "\n";
    return kExitDataError;
  }
}

}  // namespace nidwca
