// Copyright 2026 The evcoref Authors.
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


#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "evcoref/commands.h"
#include "evcoref/config.h"
#include "evcoref/experiment.h"
#include "evcoref/inference.h"
#include "evcoref/model_io.h"
#include "json.hpp"
#include "test_util.h"

namespace evcoref {
namespace {

using evcoref::testing::ReadFile;
using evcoref::testing::TempDir;
using evcoref::testing::WriteFile;
using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string Quote(const std::string &s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

RunResult RunCli(const std::vector<std::string> &args) {
  std::string cmd = Quote(EVCOREF_CLI_PATH);
  for (const std::string &a : args) cmd += " " + Quote(a);
  cmd += " 2>&1";
  RunResult r;
  FILE *pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Small corpus and dims so each pipeline step takes well under a second.
std::vector<std::string> Small(const TempDir &dir, const std::string &cmd,
                               std::vector<std::string> extra = {}) {
  std::vector<std::string> args{cmd,
                                "--set", "out_dir=" + dir.path().string(),
                                "--set", "gen.documents.train=12",
                                "--set", "gen.documents.dev=4",
                                "--set", "gen.documents.test=5",
                                "--set", "dims.token_dim=8",
                                "--set", "dims.feature_dim=4",
                                "--set", "dims.pair_dim=8",
                                "--set", "train.epochs=2"};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

RunConfig ConfigFor(const std::vector<std::string> &args) {
  std::vector<std::string> overrides;
  for (size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--set") overrides.push_back(args[++i]);
  }
  return LoadRunConfig("", overrides, std::nullopt);
}

int LineCount(const std::string &text) {
  int lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

bool IsSingleLineError(const RunResult &r, const std::string &cmd) {
  return r.code != 0 && r.output.rfind("error: " + cmd + ": ", 0) == 0 &&
         LineCount(r.output) == 1;
}

TEST(ConfigTest, OverridesChangeValuesAndHash) {
  const RunConfig base = LoadRunConfig("", {}, std::nullopt);
  EXPECT_EQ(base.dims.token_dim, 64);
  EXPECT_EQ(base.train.epochs, 30);
  const RunConfig changed = LoadRunConfig("", {"train.epochs=3", "mode=simple"}, 9);
  EXPECT_EQ(changed.train.epochs, 3);
  EXPECT_EQ(changed.mode, PairMode::kSimple);
  EXPECT_EQ(changed.seed, 9u);
  EXPECT_NE(changed.Hash(), base.Hash());
  EXPECT_EQ(LoadRunConfig("", {}, std::nullopt).Hash(), base.Hash());
  EXPECT_THROW(LoadRunConfig("", {"no_equals_sign"}, std::nullopt), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"experiment.repetitions=0"}, std::nullopt), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"mode=bogus"}, std::nullopt), std::exception);
}

TEST(ConfigTest, OutputLocationsDoNotAffectHash) {
  const RunConfig a = LoadRunConfig("", {"out_dir=/tmp/a"}, std::nullopt);
  const RunConfig b = LoadRunConfig("", {"out_dir=/tmp/b"}, std::nullopt);
  EXPECT_EQ(a.Hash(), b.Hash());
  EXPECT_EQ(a.train_path, "/tmp/a/train.jsonl");
}

TEST(ConfigTest, ExperimentConfigFileLoads) {
  const RunConfig c =
      LoadRunConfig(std::string(EVCOREF_SOURCE_DIR) + "/configs/experiment.json", {},
                    std::nullopt);
  EXPECT_EQ(c.experiment.variants.size(), 5u);
  EXPECT_EQ(c.experiment.repetitions, 5);
}

TEST(ModelIoTest, SaveLoadSaveIsByteIdentical) {
  TempDir dir("modelio");
  RunConfig config = LoadRunConfig("", {}, std::nullopt);
  config.sizes = {5, 0, 0};
  const Corpora corpora = GenerateCorpora(config, 2);
  for (PairMode mode : {PairMode::kBaseline, PairMode::kSimple, PairMode::kCdgm}) {
    Model model(config.schema, Vocabulary::FromCorpus(corpora.train), ModelDims{8, 4, 8, 1},
                mode);
    model.InitializeRandom(4);
    const std::string first = SerializeModel(model, {4, config.Hash()});
    SaveModel(model, {4, config.Hash()}, dir / "m.json");
    ModelMetadata meta;
    const std::unique_ptr<Model> loaded = LoadModel(dir / "m.json", &meta);
    EXPECT_EQ(meta.seed, 4u);
    EXPECT_EQ(meta.config_hash, config.Hash());
    EXPECT_EQ(SerializeModel(*loaded, meta), first);
    EXPECT_EQ(ReadFile(dir / "m.json"), first);
  }
  WriteFile(dir / "broken.json", "{\"format\": 1");
  EXPECT_ANY_THROW(LoadModel(dir / "broken.json", nullptr));
}

TEST(GenCommandTest, SameSeedByteIdentical) {
  TempDir a("gen_a"), b("gen_b");
  ASSERT_EQ(RunCli(Small(a, "gen")).code, 0);
  ASSERT_EQ(RunCli(Small(b, "gen")).code, 0);
  for (const char *f : {"train.jsonl", "dev.jsonl", "test.jsonl", "schema.json",
                        "gen_manifest.json"}) {
    EXPECT_EQ(ReadFile(a / f), ReadFile(b / f)) << f;
    EXPECT_FALSE(ReadFile(a / f).empty()) << f;
  }
  TempDir c("gen_c");
  ASSERT_EQ(RunCli(Small(c, "gen", {"--seed", "2"})).code, 0);
  EXPECT_NE(ReadFile(a / "train.jsonl"), ReadFile(c / "train.jsonl"));
}

TEST(GenCommandTest, ZeroDocumentsGivesEmptyFilesAndManifest) {
  TempDir dir("gen_zero");
  const RunResult r = RunCli({"gen", "--set", "out_dir=" + dir.path().string(), "--set",
                              "gen.documents.train=0", "--set", "gen.documents.dev=0",
                              "--set", "gen.documents.test=0"});
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(ReadFile(dir / "train.jsonl"), "");
  EXPECT_EQ(ReadFile(dir / "test.jsonl"), "");
  const json manifest = json::parse(ReadFile(dir / "gen_manifest.json"));
  EXPECT_EQ(manifest["documents"]["train"], 0);
  EXPECT_EQ(manifest["seed"], 1);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST(GenCommandTest, RequestedSplitSizes) {
  TempDir dir("gen_sizes");
  const RunResult r = RunCli({"gen", "--set", "out_dir=" + dir.path().string(), "--set",
                              "gen.documents.train=500", "--set", "gen.documents.dev=100",
                              "--set", "gen.documents.test=100"});
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(LineCount(ReadFile(dir / "train.jsonl")), 500);
  EXPECT_EQ(LineCount(ReadFile(dir / "dev.jsonl")), 100);
  EXPECT_EQ(LineCount(ReadFile(dir / "test.jsonl")), 100);
  const FeatureSchema schema = LoadSchema(dir / "schema.json");
  EXPECT_EQ(LoadCorpus(dir / "dev.jsonl", schema).size(), 100u);
}

TEST(GenCommandTest, UnwritableOutputFails) {
  TempDir dir("gen_bad");
  WriteFile(dir / "file", "x");
  const RunResult r = RunCli({"gen", "--set", "out_dir=" + (dir / "file") + "/sub"});
  EXPECT_TRUE(IsSingleLineError(r, "gen")) << r.output;
}

TEST(TrainCommandTest, ZeroEpochsWritesInitialization) {
  TempDir dir("train_zero");
  ASSERT_EQ(RunCli(Small(dir, "gen")).code, 0);
  const std::vector<std::string> args = Small(dir, "train", {"--set", "train.epochs=0"});
  const RunResult r = RunCli(args);
  ASSERT_EQ(r.code, 0) << r.output;

  const RunConfig config = ConfigFor(args);
  ASSERT_EQ(config.train.epochs, 0);
  Model expected(config.schema,
                 Vocabulary::FromCorpus(LoadCorpus(config.train_path, config.schema)),
                 config.dims, config.mode);
  expected.InitializeRandom(config.seed);
  EXPECT_EQ(ReadFile(config.model_path),
            SerializeModel(expected, {config.seed, config.Hash()}));
  const json history = json::parse(ReadFile(dir / "history.json"));
  EXPECT_EQ(history["config_hash"], config.Hash());
  EXPECT_EQ(history["best_epoch"], 0);
}

TEST(TrainCommandTest, RerunIsByteIdentical) {
  TempDir dir("train_rerun");
  ASSERT_EQ(RunCli(Small(dir, "gen")).code, 0);
  ASSERT_EQ(RunCli(Small(dir, "train", {"--set", "train.noise=true"})).code, 0);
  const std::string first = ReadFile(dir / "model.json");
  const std::string history = ReadFile(dir / "history.json");
  ASSERT_EQ(RunCli(Small(dir, "train", {"--set", "train.noise=true"})).code, 0);
  EXPECT_EQ(ReadFile(dir / "model.json"), first);
  EXPECT_EQ(ReadFile(dir / "history.json"), history);
}

TEST(TrainCommandTest, DevAvgImprovesOnDefaultCorpus) {
  TempDir dir("train_default");
  ASSERT_EQ(RunCli({"gen", "--set", "out_dir=" + dir.path().string()}).code, 0);
  const RunResult r = RunCli(
      {"train", "--set", "out_dir=" + dir.path().string(), "--set", "train.epochs=5"});
  ASSERT_EQ(r.code, 0) << r.output;
  const json history = json::parse(ReadFile(dir / "history.json"));
  const double initial = history["initial_dev_avg"];
  double best = initial;
  for (double v : history["dev_avg"]) best = std::max(best, v);
  EXPECT_GT(best, initial);
  EXPECT_GT(history["best_epoch"].get<int>(), 0);
}

TEST(TrainCommandTest, MissingCorpusIsOneLineError) {
  TempDir dir("train_missing");
  const RunResult r = RunCli(Small(dir, "train"));
  EXPECT_TRUE(IsSingleLineError(r, "train")) << r.output;
  EXPECT_NE(r.output.find("train.jsonl"), std::string::npos);
}

TEST(PredictCommandTest, ZeroInitModelGivesSingletons) {
  TempDir dir("predict_zero");
  ASSERT_EQ(RunCli(Small(dir, "gen")).code, 0);
  const RunConfig config = LoadRunConfig("", {"out_dir=" + dir.path().string()}, std::nullopt);
  const std::vector<Document> test = LoadCorpus(config.test_path, config.schema);
  Model model(config.schema, Vocabulary::FromCorpus(test), ModelDims{8, 4, 8, 1},
              PairMode::kCdgm);
  model.InitializeZero();
  SaveModel(model, {1, config.Hash()}, config.model_path);
  const RunResult r = RunCli(Small(dir, "predict"));
  ASSERT_EQ(r.code, 0) << r.output;
  const std::vector<DocClustering> predicted = LoadClusterings(dir / "predictions.jsonl");
  ASSERT_EQ(predicted.size(), test.size());
  for (size_t d = 0; d < test.size(); ++d) {
    EXPECT_EQ(predicted[d].doc_id, test[d].doc_id);
    ASSERT_EQ(predicted[d].clusters.size(), test[d].mentions.size());
    for (const auto &c : predicted[d].clusters) EXPECT_EQ(c.size(), 1u);
  }
  const json manifest = json::parse(ReadFile(dir / "predictions.jsonl.manifest.json"));
  EXPECT_EQ(manifest["config_hash"], ConfigFor(Small(dir, "predict")).Hash());
}

TEST(PredictCommandTest, SingleMentionDocumentsAreSingletons) {
  TempDir dir("predict_single");
  ASSERT_EQ(RunCli(Small(dir, "gen")).code, 0);
  ASSERT_EQ(RunCli(Small(dir, "train")).code, 0);
  const RunConfig config = LoadRunConfig("", {}, std::nullopt);
  std::vector<Document> docs = LoadCorpus(dir / "test.jsonl", config.schema);
  for (Document &d : docs) {
    d.mentions.resize(1);
    d.mentions[0].gold_cluster = 0;
  }
  SaveCorpus(docs, config.schema, dir / "single.jsonl");
  const RunResult r = RunCli(Small(dir, "predict", {"--input", dir / "single.jsonl",
                                                    "--output", dir / "single_pred.jsonl"}));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const DocClustering &c : LoadClusterings(dir / "single_pred.jsonl")) {
    EXPECT_EQ(c.clusters, Clustering({{0}}));
  }
}

TEST(PredictCommandTest, DeterministicAndDropSingletons) {
  TempDir dir("predict_det");
  ASSERT_EQ(RunCli(Small(dir, "gen")).code, 0);
  ASSERT_EQ(RunCli(Small(dir, "train")).code, 0);
  ASSERT_EQ(RunCli(Small(dir, "predict")).code, 0);
  const std::string first = ReadFile(dir / "predictions.jsonl");
  ASSERT_EQ(RunCli(Small(dir, "predict")).code, 0);
  EXPECT_EQ(ReadFile(dir / "predictions.jsonl"), first);
  EXPECT_FALSE(ReadFile(dir / "key.jsonl").empty());

  ASSERT_EQ(RunCli(Small(dir, "predict", {"--drop-singletons", "--output",
                                          dir / "nosingle.jsonl"}))
                .code,
            0);
  for (const DocClustering &c : LoadClusterings(dir / "nosingle.jsonl")) {
    for (const auto &cluster : c.clusters) EXPECT_GE(cluster.size(), 2u);
  }
}

TEST(PredictCommandTest, SchemaMismatchRejected) {
  TempDir dir("predict_schema");
  ASSERT_EQ(RunCli(Small(dir, "gen")).code, 0);
  const FeatureSchema other({{"Modality", 2}, {"Tense", 4}});
  Document doc{"d", {"a"}, {}};
  Mention m;
  m.features = {1, 1};
  doc.mentions.push_back(m);
  Model model(other, Vocabulary::FromCorpus({doc}), ModelDims{8, 4, 8, 1}, PairMode::kCdgm);
  SaveModel(model, {1, ""}, dir / "model.json");
  const RunResult r = RunCli(Small(dir, "predict"));
  EXPECT_TRUE(IsSingleLineError(r, "predict")) << r.output;
  EXPECT_NE(r.output.find("schema mismatch"), std::string::npos);
}

void WriteWorkedPair(const TempDir &dir) {
  WriteFile(dir / "key.jsonl", "{\"doc_id\":\"w\",\"clusters\":[[0,1,2],[3,4]]}\n");
  WriteFile(dir / "resp.jsonl", "{\"doc_id\":\"w\",\"clusters\":[[0,1],[2,3,4]]}\n");
}

TEST(ScoreCommandTest, WorkedExampleMatchesOracleValues) {
  TempDir dir("score_worked");
  WriteWorkedPair(dir);
  const RunResult r = RunCli({"score", "--key", dir / "key.jsonl", "--response",
                              dir / "resp.jsonl", "--output", dir / "s.json"});
  ASSERT_EQ(r.code, 0) << r.output;
  const json s = json::parse(ReadFile(dir / "s.json"));
  // Hand enumeration: MUC 2/3; B3 per mention (2/3,2/3,1/3,1/2,1/2) on both
  // sides; CEAF phi4 diagonal 0.8 + 0.8 over 2 clusters; BLANC links
  // C_k={01,02,12,34}, C_r={01,23,24,34} -> F_c=1/2, non-links -> F_n=2/3.
  const double muc = 2.0 / 3, b3 = 11.0 / 15, ceaf = 0.8, blanc = 7.0 / 12;
  EXPECT_NEAR(s["muc"]["f1"].get<double>(), muc, 1e-12);
  EXPECT_NEAR(s["b3"]["f1"].get<double>(), b3, 1e-12);
  EXPECT_NEAR(s["b3"]["precision"].get<double>(), b3, 1e-12);
  EXPECT_NEAR(s["ceaf_e"]["f1"].get<double>(), ceaf, 1e-12);
  EXPECT_NEAR(s["blanc"]["f1"].get<double>(), blanc, 1e-12);
  EXPECT_NEAR(s["conll"].get<double>(), (muc + b3 + ceaf) / 3, 1e-12);
  EXPECT_NEAR(s["avg"].get<double>(), (muc + b3 + ceaf + blanc) / 4, 1e-12);
  EXPECT_EQ(s["config_hash"], LoadRunConfig("", {}, std::nullopt).Hash());
  EXPECT_NE(r.output.find("MUC"), std::string::npos);
}

TEST(ScoreCommandTest, ResponseEqualsKeyGivesOnes) {
  TempDir dir("score_same");
  WriteFile(dir / "key.jsonl",
            "{\"doc_id\":\"a\",\"clusters\":[[0,2],[1],[3,4,5]]}\n"
            "{\"doc_id\":\"b\",\"clusters\":[[0,1]]}\n");
  ASSERT_EQ(RunCli({"score", "--key", dir / "key.jsonl", "--response", dir / "key.jsonl",
                    "--output", dir / "s.json"})
                .code,
            0);
  const json s = json::parse(ReadFile(dir / "s.json"));
  for (const char *m : {"muc", "b3", "ceaf_e", "blanc"}) {
    for (const char *k : {"precision", "recall", "f1"}) EXPECT_EQ(s[m][k], 1.0) << m << k;
  }
  EXPECT_EQ(s["avg"], 1.0);
  EXPECT_EQ(s["conll"], 1.0);
}

TEST(ScoreCommandTest, MismatchedDocIdsNamed) {
  TempDir dir("score_ids");
  WriteFile(dir / "key.jsonl", "{\"doc_id\":\"alpha\",\"clusters\":[[0]]}\n");
  WriteFile(dir / "resp.jsonl", "{\"doc_id\":\"beta\",\"clusters\":[[0]]}\n");
  const RunResult r = RunCli({"score", "--key", dir / "key.jsonl", "--response",
                              dir / "resp.jsonl", "--output", dir / "s.json"});
  EXPECT_TRUE(IsSingleLineError(r, "score")) << r.output;
  EXPECT_NE(r.output.find("alpha"), std::string::npos) << r.output;
  EXPECT_THROW(CmdScore(dir / "resp.jsonl", dir / "key.jsonl", ""), CommandError);
}

TEST(ScoreCommandTest, MissingRequiredFlagFails) {
  const RunResult r = RunCli({"score", "--key", "k.jsonl"});
  EXPECT_NE(r.code, 0);
}

TEST(GradcheckCommandTest, DefaultPasses) {
  const RunResult r = RunCli({"gradcheck"});
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("PASS"), std::string::npos);
  const GradcheckOutcome o = CmdGradcheck(LoadRunConfig("", {}, std::nullopt), {});
  EXPECT_TRUE(o.report.passed);
  EXPECT_LT(o.report.worst, 1e-4);
  EXPECT_TRUE(o.report.skipped.empty());
}

TEST(GradcheckCommandTest, CorruptedBlockReported) {
  const RunResult r = RunCli({"gradcheck", "--corrupt-block", "ffnn_g"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("error: gradcheck: gradient mismatch in blocks ffnn_g\n"),
            std::string::npos)
      << r.output;
}

TEST(GradcheckCommandTest, NoFeaturesListsSkippedBlocks) {
  GradcheckCommandOptions options;
  options.num_features = 0;
  const GradcheckOutcome o = CmdGradcheck(LoadRunConfig("", {}, std::nullopt), options);
  EXPECT_TRUE(o.report.passed);
  EXPECT_FALSE(o.report.skipped.empty());
  EXPECT_NE(o.text.find("skipped"), std::string::npos);
  const RunResult r = RunCli({"gradcheck", "--features", "9"});
  EXPECT_TRUE(IsSingleLineError(r, "gradcheck")) << r.output;
}

TEST(ExperimentCommandTest, SingleVariantOneRowAndDeterministic) {
  TempDir a("exp_a"), b("exp_b");
  const std::vector<std::string> extra{"--set", R"(experiment.variants=["cdgm"])", "--set",
                                       "experiment.repetitions=1"};
  const RunResult ra = RunCli(Small(a, "experiment", extra));
  const RunResult rb = RunCli(Small(b, "experiment", extra));
  ASSERT_EQ(ra.code, 0) << ra.output;
  EXPECT_EQ(ra.output, rb.output);
  EXPECT_EQ(ReadFile(a / "experiment.json"), ReadFile(b / "experiment.json"));
  const json j = json::parse(ReadFile(a / "experiment.json"));
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["variant"], "cdgm");
  EXPECT_EQ(LineCount(ra.output), 3);  // header, one row, footer
}

TEST(CliTest, UnknownSubcommandOrConfigFails) {
  EXPECT_NE(RunCli({"frobnicate"}).code, 0);
  const RunResult r = RunCli({"gen", "--config", "/nonexistent/cfg.json"});
  EXPECT_TRUE(IsSingleLineError(r, "gen")) << r.output;
}

}  // namespace
}  // namespace evcoref
