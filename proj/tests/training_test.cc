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


#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "evcoref/config.h"
#include "evcoref/experiment.h"
#include "evcoref/gradcheck.h"
#include "evcoref/inference.h"
#include "evcoref/model.h"
#include "evcoref/training.h"

namespace evcoref {
namespace {

Document FlatDocument(int mentions, const std::vector<int> &values) {
  Document doc{"flat", std::vector<std::string>(mentions, "x"), {}};
  for (int i = 0; i < mentions; ++i) {
    Mention m;
    m.start = m.end = i;
    m.features = values;
    m.gold_cluster = i;
    doc.mentions.push_back(m);
  }
  return doc;
}

Document ClusteredDocument(const std::vector<int> &clusters, int num_features = 2) {
  Document doc{"c", {}, {}};
  for (size_t i = 0; i < clusters.size(); ++i) {
    doc.tokens.push_back("w" + std::to_string(i));
    doc.tokens.push_back("t" + std::to_string(clusters[i]));
    Mention m;
    m.start = m.end = static_cast<int>(2 * i + 1);
    m.features = std::vector<int>(num_features, 1 + clusters[i] % 2);
    m.gold_cluster = clusters[i];
    doc.mentions.push_back(m);
  }
  return doc;
}

// Direct enumeration of Y(i), independent of the log-sum-exp path.
double BruteForceNll(const PairScoreMatrix &s, const std::vector<int> &clusters) {
  double loss = 0;
  for (int i = 0; i < s.num_mentions(); ++i) {
    double all = 1.0;  // exp(0) for the dummy
    double gold = 0.0;
    bool any_gold = false;
    for (int j = 0; j < i; ++j) {
      const double e = std::exp(s.at(i, j));
      all += e;
      if (clusters[j] == clusters[i]) {
        gold += e;
        any_gold = true;
      }
    }
    if (!any_gold) gold = 1.0;
    loss -= std::log(gold / all);
  }
  return loss;
}

TEST(NoiseConfigTest, DefaultsAndValidation) {
  const NoiseConfig n = NoiseConfig::AceDefault();
  EXPECT_EQ(n.epsilon, (std::vector<double>{0, 0, 0.15, 0.15, 0.25}));
  EXPECT_NO_THROW(n.Validate(FeatureSchema::AceDefault()));
  EXPECT_THROW(NoiseConfig{{0.1}}.Validate(FeatureSchema::AceDefault()), std::invalid_argument);
  EXPECT_THROW(NoiseConfig{{1.5}}.Validate(FeatureSchema({{"A", 2}})), std::invalid_argument);
}

TEST(ApplyNoiseTest, ZeroEpsilonUnchanged) {
  const FeatureSchema schema = FeatureSchema::AceDefault();
  const Document doc = FlatDocument(500, {3, 1, 2, 1, 4});
  std::mt19937_64 rng(1);
  EXPECT_EQ(ApplyNoise(doc, schema, NoiseConfig{{0, 0, 0, 0, 0}}, rng), doc);
}

double ChangedFraction(double epsilon, uint64_t seed) {
  const FeatureSchema schema({{"Tense", 4}});
  const Document doc = FlatDocument(1000, {2});
  std::mt19937_64 rng(seed);
  int changed = 0;
  for (int rep = 0; rep < 100; ++rep) {
    for (const Mention &m : ApplyNoise(doc, schema, NoiseConfig{{epsilon}}, rng).mentions) {
      changed += m.features[0] != 2;
    }
  }
  return changed / 100000.0;
}

TEST(ApplyNoiseTest, FullResamplingChangesThreeQuarters) {
  const double p = 0.75;
  EXPECT_LE(std::fabs(ChangedFraction(1.0, 5) - p), 3 * std::sqrt(p * (1 - p) / 1e5));
}

TEST(ApplyNoiseTest, TenseEpsilonStatistics) {
  const double p = 0.25 * 0.75;
  EXPECT_LE(std::fabs(ChangedFraction(0.25, 6) - p), 3 * std::sqrt(p * (1 - p) / 1e5));
}

TEST(ApplyNoiseTest, OnlyFeatureValuesChange) {
  const FeatureSchema schema = FeatureSchema::AceDefault();
  Document doc = ClusteredDocument({0, 1, 0, 2, 1}, 5);
  std::mt19937_64 rng(2);
  const Document noisy = ApplyNoise(doc, schema, NoiseConfig{{1, 1, 1, 1, 1}}, rng);
  EXPECT_EQ(noisy.tokens, doc.tokens);
  EXPECT_EQ(noisy.doc_id, doc.doc_id);
  ASSERT_EQ(noisy.mentions.size(), doc.mentions.size());
  for (size_t i = 0; i < doc.mentions.size(); ++i) {
    EXPECT_EQ(noisy.mentions[i].start, doc.mentions[i].start);
    EXPECT_EQ(noisy.mentions[i].end, doc.mentions[i].end);
    EXPECT_EQ(noisy.mentions[i].gold_cluster, doc.mentions[i].gold_cluster);
  }
  EXPECT_EQ(ValidateDocument(noisy, schema), "");
}

TEST(GoldAntecedentsTest, Examples) {
  EXPECT_EQ(GoldAntecedents(0, {5, 5}), (std::vector<int>{kDummy}));
  EXPECT_EQ(GoldAntecedents(2, {0, 0, 1}), (std::vector<int>{kDummy}));
  EXPECT_EQ(GoldAntecedents(2, {0, 0, 0}), (std::vector<int>{0, 1}));
  Document doc = ClusteredDocument({0, 1});
  doc.mentions[1].gold_cluster.reset();
  EXPECT_THROW(GoldClusterIds(doc), std::invalid_argument);
}

TEST(AntecedentNllTest, Anchors) {
  EXPECT_EQ(AntecedentNll(PairScoreMatrix(1), {0}), 0.0);
  PairScoreMatrix two(2);
  two.at(1, 0) = 0.0;
  EXPECT_NEAR(AntecedentNll(two, {0, 1}), std::log(2.0), 1e-12);
}

TEST(AntecedentNllTest, MatchesEnumerationAndTape) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> val(-3, 3);
  for (const std::vector<int> &clusters :
       {std::vector<int>{0, 0, 0}, {0, 1, 0}, {0, 1, 2}, {0, 0, 1, 1, 0}}) {
    for (int trial = 0; trial < 20; ++trial) {
      PairScoreMatrix s(static_cast<int>(clusters.size()));
      for (double &v : s.mutable_values()) v = val(rng);
      const double expected = BruteForceNll(s, clusters);
      EXPECT_NEAR(AntecedentNll(s, clusters), expected, 1e-12);
      Tape tape;
      std::vector<Var> vars;
      for (double v : s.values()) vars.push_back(tape.Scalar(v));
      EXPECT_NEAR(tape.scalar(AntecedentNll(tape, vars, clusters)), expected, 1e-12);
      EXPECT_GE(AntecedentNll(s, clusters), 0.0);
    }
  }
}

TEST(AntecedentNllTest, ShiftInvarianceOnlyWhenDummyShiftsToo) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> val(-2, 2);
  const std::vector<int> clusters{0, 1, 0, 1};
  for (int trial = 0; trial < 50; ++trial) {
    PairScoreMatrix s(4);
    for (double &v : s.mutable_values()) v = val(rng);
    const double c = 1.7;
    PairScoreMatrix shifted = s;
    for (double &v : shifted.mutable_values()) v += c;
    // Shifting every s(i, .) including the dummy: the dummy's own shift is
    // emulated by subtracting c from the pair scores relative to it, i.e.
    // the joint shift leaves every softmax unchanged.
    double joint = 0.0;
    for (int i = 0; i < 4; ++i) {
      double all = std::exp(0.0 + c), gold = 0.0;
      bool any = false;
      for (int j = 0; j < i; ++j) {
        all += std::exp(shifted.at(i, j));
        if (clusters[j] == clusters[i]) {
          gold += std::exp(shifted.at(i, j));
          any = true;
        }
      }
      if (!any) gold = std::exp(0.0 + c);
      joint -= std::log(gold / all);
    }
    EXPECT_NEAR(joint, AntecedentNll(s, clusters), 1e-12);
    // Dummy pinned at 0: the loss moves.
    EXPECT_GT(std::fabs(AntecedentNll(shifted, clusters) - AntecedentNll(s, clusters)), 1e-6);
  }
}

TEST(DocumentLossTest, GradientCheckThreeMentionsTwoFeatures) {
  const FeatureSchema schema({{"Modality", 2}, {"Tense", 4}});
  Document doc{"g", {"a", "t1", "b", "t2", "p", "c", "t1"}, {}};
  const int spans[3][2] = {{1, 1}, {3, 4}, {6, 6}};
  const std::vector<std::vector<int>> feats{{1, 2}, {2, 4}, {1, 2}};
  const int clusters[3] = {0, 1, 0};
  for (int i = 0; i < 3; ++i) {
    Mention m;
    m.start = spans[i][0];
    m.end = spans[i][1];
    m.features = feats[i];
    m.gold_cluster = clusters[i];
    doc.mentions.push_back(m);
  }
  for (PairMode mode : {PairMode::kBaseline, PairMode::kSimple, PairMode::kCdgm}) {
    Model model(schema, Vocabulary::FromCorpus({doc}), ModelDims{6, 4, 6, 1}, mode);
    model.InitializeWellScaled(21);
    const GradCheckReport report = GradCheck(
        [&](Tape &tape) { return DocumentLoss(tape, model, doc); }, model.store());
    EXPECT_TRUE(report.passed) << PairModeName(mode) << " worst " << report.worst;
  }
}

TEST(AdamTest, FirstStepMovesByGroupLearningRate) {
  ParameterStore store;
  Parameter &lo = store.Add("lower", 2, 1, ParamGroup::kLower);
  Parameter &hi = store.Add("upper", 2, 1, ParamGroup::kUpper);
  lo.value = {1, 1};
  hi.value = {1, 1};
  lo.grad = {0.3, -2};
  hi.grad = {5, 0};
  AdamOptimizer adam(store, 1e-3, 2.5e-3);
  adam.Step();
  EXPECT_NEAR(lo.value[0], 1 - 1e-3, 1e-9);
  EXPECT_NEAR(lo.value[1], 1 + 1e-3, 1e-9);
  EXPECT_NEAR(hi.value[0], 1 - 2.5e-3, 1e-9);
  EXPECT_EQ(hi.value[1], 1.0);
}

struct SmallSetup {
  RunConfig config;
  Corpora corpora;
  Vocabulary vocab;
  SmallSetup(int train, int dev) {
    config = LoadRunConfig("", {}, std::nullopt);
    config.sizes = {train, dev, 0};
    config.dims = ModelDims{12, 4, 8, 2};
    corpora = GenerateCorpora(config, 3);
    vocab = Vocabulary::FromCorpus(corpora.train);
  }
};

TEST(TrainTest, ZeroEpochsLeavesParametersUnchanged) {
  SmallSetup s(12, 4);
  Model model(s.config.schema, s.vocab, s.config.dims, PairMode::kCdgm);
  model.InitializeRandom(5);
  const auto before = model.store().Snapshot();
  TrainConfig tc;
  tc.epochs = 0;
  const TrainHistory h = Train(model, s.corpora.train, &s.corpora.dev, tc, s.config.noise);
  EXPECT_EQ(model.store().Snapshot(), before);
  EXPECT_TRUE(h.epoch_loss.empty());
  EXPECT_EQ(h.best_epoch, 0);
}

TEST(TrainTest, SameSeedBitIdenticalTrajectories) {
  SmallSetup s(16, 6);
  TrainConfig tc;
  tc.epochs = 3;
  tc.noise = true;
  std::vector<std::vector<Vector>> runs;
  std::vector<TrainHistory> histories;
  for (int r = 0; r < 2; ++r) {
    Model model(s.config.schema, s.vocab, s.config.dims, PairMode::kCdgm);
    model.InitializeRandom(5);
    histories.push_back(Train(model, s.corpora.train, &s.corpora.dev, tc, s.config.noise));
    runs.push_back(model.store().Snapshot());
  }
  EXPECT_EQ(runs[0], runs[1]);
  EXPECT_EQ(histories[0].epoch_loss, histories[1].epoch_loss);
  EXPECT_EQ(histories[0].dev_avg, histories[1].dev_avg);
}

TEST(TrainTest, RestoresBestDevCheckpoint) {
  SmallSetup s(16, 6);
  TrainConfig tc;
  tc.epochs = 4;
  Model model(s.config.schema, s.vocab, s.config.dims, PairMode::kSimple);
  model.InitializeRandom(2);
  const TrainHistory h = Train(model, s.corpora.train, &s.corpora.dev, tc, s.config.noise);
  ASSERT_EQ(h.dev_avg.size(), 4u);
  double best = *h.initial_dev_avg;
  for (double v : h.dev_avg) best = std::max(best, v);
  EXPECT_DOUBLE_EQ(EvaluateCorpus(model, s.corpora.dev).avg, best);
  for (double l : h.epoch_loss) {
    EXPECT_TRUE(std::isfinite(l));
    EXPECT_GE(l, 0.0);
  }
}

TEST(TrainTest, NonFiniteLossReportsEpochAndBatch) {
  SmallSetup s(8, 0);
  Model model(s.config.schema, s.vocab, s.config.dims, PairMode::kCdgm);
  model.InitializeRandom(1);
  model.store().Find("ffnn_a/b2")->value[0] = std::numeric_limits<double>::infinity();
  TrainConfig tc;
  tc.epochs = 1;
  try {
    Train(model, s.corpora.train, nullptr, tc, s.config.noise);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError &e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch 0"), std::string::npos) << msg;
  }
}

TEST(TrainTest, RejectsBadConfig) {
  SmallSetup s(4, 0);
  Model model(s.config.schema, s.vocab, s.config.dims, PairMode::kCdgm);
  TrainConfig tc;
  tc.batch_size = 0;
  EXPECT_THROW(Train(model, s.corpora.train, nullptr, tc, s.config.noise),
               std::invalid_argument);
  tc = TrainConfig{};
  EXPECT_THROW(Train(model, {}, nullptr, tc, s.config.noise), std::invalid_argument);
}

// Desk-scale progress check on the default 200-document corpus and dims.
TEST(TrainTest, ThirtyEpochsHalveTheTrainingLoss) {
  RunConfig config = LoadRunConfig("", {}, std::nullopt);
  config.sizes.dev = 0;
  config.sizes.test = 0;
  const Corpora corpora = GenerateCorpora(config, config.seed);
  ASSERT_EQ(corpora.train.size(), 200u);
  Model model(config.schema, Vocabulary::FromCorpus(corpora.train), config.dims, config.mode);
  model.InitializeRandom(config.seed);
  ASSERT_EQ(config.train.epochs, 30);
  const TrainHistory h = Train(model, corpora.train, nullptr, config.train, config.noise);
  ASSERT_EQ(h.epoch_loss.size(), 30u);
  EXPECT_LT(h.epoch_loss.back(), 0.5 * h.initial_loss)
      << h.epoch_loss.back() << " vs " << h.initial_loss;
}

TEST(EvaluateTest, PredictionsAreValidPartitions) {
  SmallSetup s(6, 0);
  Model model(s.config.schema, s.vocab, s.config.dims, PairMode::kCdgm);
  model.InitializeZero();
  const auto predicted = PredictCorpus(model, s.corpora.train);
  ASSERT_EQ(predicted.size(), 6u);
  for (size_t d = 0; d < predicted.size(); ++d) {
    EXPECT_EQ(predicted[d].size(), s.corpora.train[d].mentions.size());
  }
}

}  // namespace
}  // namespace evcoref
