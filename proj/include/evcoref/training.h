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

#ifndef EVCOREF_TRAINING_H_
#define EVCOREF_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "evcoref/autodiff.h"
#include "evcoref/corpus.h"
#include "evcoref/metrics.h"
#include "evcoref/model.h"

namespace evcoref {

// Per-feature resampling probabilities for noisy training.
struct NoiseConfig {
  std::vector<double> epsilon;

  // Predicted-mention values for Type, Polarity, Modality, Genericity, Tense.
  static NoiseConfig AceDefault();
  // Throws std::invalid_argument if the size differs from the schema or a
  // value lies outside [0, 1].
  void Validate(const FeatureSchema &schema) const;
};

struct TrainConfig {
  double lower_lr = 1e-3;   // encoder and feature embeddings
  double upper_lr = 2.5e-3; // pair-model FFNNs
  int batch_size = 8;
  int epochs = 30;
  uint64_t seed = 1;
  bool noise = false;
};

struct TrainHistory {
  double initial_loss = 0.0;           // mean loss before any update
  std::vector<double> epoch_loss;      // mean per-document loss
  std::optional<double> initial_dev_avg;
  std::vector<double> dev_avg;
  int best_epoch = 0;                  // 0 = initialization
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Algorithm-1 style corruption: for every mention and feature u, with
// probability epsilon_u the value is replaced by a uniform draw over all
// N_u values (possibly the same one). Only feature values change.
Document ApplyNoise(const Document &doc, const FeatureSchema &schema,
                    const NoiseConfig &noise, std::mt19937_64 &rng);

// Gold cluster id of every mention. Throws std::invalid_argument naming
// the first mention without one.
std::vector<int> GoldClusterIds(const Document &doc);

// All j < i in the same gold cluster as i, or {kDummy} when there is none.
std::vector<int> GoldAntecedents(int i, const std::vector<int> &cluster_ids);

// -sum_i log( sum_{gold} exp s(i,y) / sum_{Y(i)} exp s(i,y) ), s(i, dummy) = 0.
double AntecedentNll(const PairScoreMatrix &scores,
                     const std::vector<int> &cluster_ids);
// Same loss recorded on a tape; `scores` in PairScoreMatrix::Index order.
Var AntecedentNll(Tape &tape, const std::vector<Var> &scores,
                  const std::vector<int> &cluster_ids);

// Full-document loss under the model, recorded on `tape`.
Var DocumentLoss(Tape &tape, const Model &model, const Document &doc);

// Adam with one learning rate per parameter group.
class AdamOptimizer {
 public:
  AdamOptimizer(ParameterStore &store, double lower_lr, double upper_lr,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void Step();

 private:
  ParameterStore &store_;
  double lower_lr_, upper_lr_, beta1_, beta2_, eps_;
  int64_t steps_ = 0;
  std::vector<Vector> m_;
  std::vector<Vector> v_;
};

std::vector<Clustering> PredictCorpus(const Model &model,
                                      const std::vector<Document> &docs);
// Micro-averaged report of the model's predictions against gold clusters.
MetricReport EvaluateCorpus(const Model &model, const std::vector<Document> &docs);

struct EpochInfo {
  int epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> dev_avg;
};

// Trains in place. With a dev corpus, the parameters of the best dev AVG
// (initialization included) are restored at the end. Deterministic given
// config.seed.
TrainHistory Train(Model &model, const std::vector<Document> &train,
                   const std::vector<Document> *dev, const TrainConfig &config,
                   const NoiseConfig &noise,
                   const std::function<void(const EpochInfo &)> &on_epoch = {});

}  // namespace evcoref

#endif  // EVCOREF_TRAINING_H_
