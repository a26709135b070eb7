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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>
#include <sstream>

#include "nidwca/model.hpp"
#include "nidwca/serialize.hpp"

using namespace nidwca;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_command(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "nidwca_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(run({"gen-synthetic", "--normal", "80", "--attack", "80", "--seed", "1", "--out",
                   p("train.kdd")}).code, 0);
    ASSERT_EQ(run({"gen-synthetic", "--normal", "40", "--attack", "40", "--seed", "2", "--out",
                   p("test.kdd")}).code, 0);
    write_file(p("cfg.json"), R"({"ga": {"population_size": 12, "generations": 5},
                                  "classifiers": [{"name": "dos", "positives": ["DoS"]}]})");
    ASSERT_EQ(run({"train", "--data", p("train.kdd"), "--config", p("cfg.json"), "--seed", "7",
                   "--out", p("m.model")}).code, 0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string p(const std::string& name) { return (dir_ / name).string(); }
  static fs::path dir_;
};
fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, TrainIsByteDeterministic) {
  const Outcome r = run({"train", "--data", p("train.kdd"), "--config", p("cfg.json"), "--seed", "7",
                     "--out", p("again.model")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("wrote"), std::string::npos);
  EXPECT_EQ(read_file(p("again.model")), read_file(p("m.model")));
  const Model m = load_model(p("m.model"));
  EXPECT_EQ(m.seed(), 7u);
  EXPECT_EQ(m.config.tree.ga.generations, 5u);
}

TEST_F(Cli, ClassifyStreamsOneVerdictPerRecord) {
  const std::string records = read_file(p("test.kdd"));
  const Outcome r = run({"classify", "--model", p("m.model")}, records);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  const std::regex shape(R"((normal|attack),[01]\.\d{6},(\d+\*?)(/\d+\*?)*)");
  std::vector<std::string> verdicts;
  for (std::string l; std::getline(lines, l);) {
    EXPECT_TRUE(std::regex_match(l, shape)) << l;
    verdicts.push_back(l);
  }
  ASSERT_EQ(verdicts.size(), 80u);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    correct += verdicts[i].rfind(i < 40 ? "normal" : "attack", 0) == 0;
  }
  EXPECT_GE(correct, 76u);

  // a record's verdict does not depend on the rest of the batch
  std::istringstream in(records);
  std::vector<std::string> rec;
  for (std::string l; std::getline(in, l);) rec.push_back(l);
  for (std::size_t i : {0u, 17u, 79u}) {
    const Outcome one = run({"classify", "--model", p("m.model")}, rec[i] + "\n");
    EXPECT_EQ(one.out, verdicts[i] + "\n");
  }
  const Outcome file = run({"classify", "--model", p("m.model"), "--data", p("test.kdd")});
  EXPECT_EQ(file.out, r.out);

  const Outcome strict = run({"classify", "--model", p("m.model"), "--threshold", "1"}, rec[79]);
  EXPECT_EQ(strict.code, 0);
}

TEST_F(Cli, InspectShowsDependencyMatrixLayout) {
  Model m;
  m.taxonomy_digest = "sha256:test";
  m.tree.chromosome = RuleVector::from_wolfram({238, 254, 238, 252});
  m.tree.feature_order = {0, 1, 2, 3};
  m.normalizer.categories = {{{"tcp"}, {"http"}, {"SF"}}};
  const BasinId a{{16, 16, 0, 0}, 1};
  m.tree.basins[a] = BasinStats{a, 3, 1, 1.0 / 3.0, Label::kNormal};
  save_model(m, p("fig1.model"));
  const Outcome r = run({"inspect", "--model", p("fig1.model")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1 1 0 0\n1 1 1 0\n0 0 1 1\n0 0 1 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("<238,254,238,252>"), std::string::npos);
  EXPECT_NE(r.out.find("0 3 1 0.333333 normal 1 -"), std::string::npos);
}

TEST_F(Cli, InspectTrainedModel) {
  const Outcome r = run({"inspect", "--model", p("m.model")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mode labeled"), std::string::npos);
  EXPECT_NE(r.out.find("seed 7"), std::string::npos);
  EXPECT_NE(r.out.find("dependency matrix"), std::string::npos);
}

TEST_F(Cli, EvaluateWritesReplayableReport) {
  const Outcome r = run({"evaluate", "--data", p("train.kdd"), "--test", p("test.kdd"), "--config",
                     p("cfg.json"), "--seed", "3", "--out", p("report")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(p("report/dos.csv")));
  const auto summary = nlohmann::json::parse(read_file(p("report/summary.json")));
  EXPECT_EQ(summary["config"]["seed"], 3);
  EXPECT_EQ(summary["input_digests"]["train"].get<std::string>().rfind("sha256:", 0), 0u);

  // the echoed config is itself a valid --config
  write_file(p("echo.json"), summary["config"].dump());
  const Outcome replay = run({"evaluate", "--data", p("train.kdd"), "--test", p("test.kdd"),
                          "--config", p("echo.json"), "--out", p("replay")});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(read_file(p("replay/dos.csv")), read_file(p("report/dos.csv")));
}

TEST_F(Cli, EvaluateExistingModel) {
  const Outcome r = run({"evaluate", "--model", p("m.model"), "--test", p("test.kdd"), "--out",
                     p("model_report")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(p("model_report/model.csv")));
  EXPECT_NE(r.out.find("model: threshold"), std::string::npos);
}

TEST_F(Cli, GenSyntheticToStdout) {
  const Outcome r = run({"gen-synthetic", "--normal", "2", "--attack", "1", "--unlabeled"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_EQ(std::count(r.out.begin(), r.out.begin() + r.out.find('\n'), ','), 40);
  EXPECT_EQ(run({"gen-synthetic", "--attack-label", "zork"}).code, 1);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"train", "--data", "x"},
           {"train", "--data", "x", "--out", "y", "--bogus"},
           {"classify", "--model", "m", "--threshold", "2"},
           {"train", "--data", "x", "--out", "y", "--mode", "semi"},
           {"evaluate", "--test", "t", "--out", "o"},
       }) {
    const Outcome r = run(args);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(first_line(r.err).rfind("error[usage]: ", 0), 0u) << r.err;
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
  }
  const Outcome help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("classify"), std::string::npos);
}

TEST_F(Cli, DataErrorsExitOneWithSingleLine) {
  auto expect_error = [](const Outcome& r, int code, const std::string& kind,
                         const std::string& mention) {
    EXPECT_EQ(r.code, code);
    EXPECT_EQ(r.err.rfind("error[" + kind + "]: ", 0), 0u) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    EXPECT_NE(r.err.find(mention), std::string::npos) << r.err;
  };
  expect_error(run({"classify", "--model", p("missing.model")}), 1, "io", "missing.model");
  write_file(p("trunc.model"), read_file(p("m.model")).substr(0, 100));
  expect_error(run({"classify", "--model", p("trunc.model")}), 1, "corrupt-file", "JSON");
  expect_error(run({"classify", "--model", p("m.model")}, "1,2,3\n"), 1, "format", "line 1");

  ASSERT_EQ(run({"gen-synthetic", "--normal", "5", "--attack", "5", "--unlabeled", "--out",
                 p("unl.kdd")}).code, 0);
  expect_error(run({"train", "--data", p("unl.kdd"), "--out", p("x.model")}), 1, "mode",
               "unl.kdd");
  write_file(p("bad.json"), R"({"ga": {"crossover_rate": 4}})");
  expect_error(run({"train", "--data", p("train.kdd"), "--config", p("bad.json"), "--out",
                    p("x.model")}), 2, "config", "crossover_rate");
  expect_error(run({"evaluate", "--data", p("train.kdd"), "--test", p("test.kdd"), "--out",
                    p("rep3")}), 1, "missing-category", "Probe");
}

TEST_F(Cli, UnlabeledTrainingAndThreadCap) {
  ASSERT_EQ(run({"gen-synthetic", "--normal", "60", "--attack", "4", "--unlabeled", "--out",
                 p("u.kdd")}).code, 0);
  ::setenv("NIDWCA_THREADS", "2", 1);
  const Outcome r = run({"train", "--data", p("u.kdd"), "--config", p("cfg.json"), "--mode",
                     "unlabeled", "--out", p("u.model")});
  ::setenv("NIDWCA_THREADS", "lots", 1);
  const Outcome bad = run({"train", "--data", p("u.kdd"), "--out", p("u2.model")});
  ::unsetenv("NIDWCA_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_model(p("u.model")).mode(), DatasetMode::kUnlabeled);
  EXPECT_EQ(bad.code, 2);
  const Outcome c = run({"classify", "--model", p("u.model"), "--data", p("u.kdd")});
  EXPECT_EQ(c.code, 0) << c.err;
}
