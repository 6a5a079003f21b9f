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

#include "evcoref/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evcoref/inference.h"
#include "evcoref/synthetic.h"

namespace evcoref {

NoiseConfig NoiseConfig::AceDefault() { return {{0.0, 0.0, 0.15, 0.15, 0.25}}; }

void NoiseConfig::Validate(const FeatureSchema &schema) const {
  if (epsilon.size() != static_cast<size_t>(schema.size())) {
    throw std::invalid_argument("noise: expected " + std::to_string(schema.size()) +
                                " epsilon values, got " +
                                std::to_string(epsilon.size()));
  }
  for (double e : epsilon) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw std::invalid_argument("noise: epsilon must be in [0, 1]");
    }
  }
}

Document ApplyNoise(const Document &doc, const FeatureSchema &schema,
                    const NoiseConfig &noise, std::mt19937_64 &rng) {
  Document out = doc;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Mention &m : out.mentions) {
    for (int u = 0; u < schema.size(); ++u) {
      if (coin(rng) < noise.epsilon[u]) {
        m.features[u] =
            std::uniform_int_distribution<int>(1, schema[u].cardinality)(rng);
      }
    }
  }
  return out;
}

std::vector<int> GoldClusterIds(const Document &doc) {
  std::vector<int> ids;
  ids.reserve(doc.mentions.size());
  for (size_t i = 0; i < doc.mentions.size(); ++i) {
    if (!doc.mentions[i].gold_cluster) {
      throw std::invalid_argument("document " + doc.doc_id + ": mention " +
                                  std::to_string(i) +
                                  " has no gold cluster");
    }
    ids.push_back(*doc.mentions[i].gold_cluster);
  }
  return ids;
}

std::vector<int> GoldAntecedents(int i, const std::vector<int> &cluster_ids) {
  std::vector<int> gold;
  for (int j = 0; j < i; ++j) {
    if (cluster_ids[j] == cluster_ids[i]) gold.push_back(j);
  }
  if (gold.empty()) gold.push_back(kDummy);
  return gold;
}

namespace {

double LogSumExp(const std::vector<double> &xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace

double AntecedentNll(const PairScoreMatrix &scores,
                     const std::vector<int> &cluster_ids) {
  const int k = scores.num_mentions();
  double loss = 0.0;
  for (int i = 1; i < k; ++i) {
    std::vector<double> all{0.0};
    for (int j = 0; j < i; ++j) all.push_back(scores.at(i, j));
    std::vector<double> gold;
    for (int j : GoldAntecedents(i, cluster_ids)) {
      gold.push_back(j == kDummy ? 0.0 : scores.at(i, j));
    }
    loss += LogSumExp(all) - LogSumExp(gold);
  }
  // The first mention has Y = GOLD = {dummy} and contributes 0.
  return loss;
}

Var AntecedentNll(Tape &tape, const std::vector<Var> &scores,
                  const std::vector<int> &cluster_ids) {
  const int k = static_cast<int>(cluster_ids.size());
  const Var dummy = tape.Scalar(0.0);
  std::vector<Var> terms;
  for (int i = 1; i < k; ++i) {
    std::vector<Var> all{dummy};
    for (int j = 0; j < i; ++j) all.push_back(scores[PairScoreMatrix::Index(i, j)]);
    std::vector<Var> gold;
    for (int j : GoldAntecedents(i, cluster_ids)) {
      gold.push_back(j == kDummy ? dummy : scores[PairScoreMatrix::Index(i, j)]);
    }
    terms.push_back(tape.Sub(tape.LogSumExp(all), tape.LogSumExp(gold)));
  }
  if (terms.empty()) return tape.Scalar(0.0);
  return tape.Sum(terms);
}

Var DocumentLoss(Tape &tape, const Model &model, const Document &doc) {
  return AntecedentNll(tape, model.BuildScores(tape, doc), GoldClusterIds(doc));
}

AdamOptimizer::AdamOptimizer(ParameterStore &store, double lower_lr,
                             double upper_lr, double beta1, double beta2,
                             double eps)
    : store_(store),
      lower_lr_(lower_lr),
      upper_lr_(upper_lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {
  for (const Parameter &p : store_.params()) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void AdamOptimizer::Step() {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto &params = store_.params();
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Parameter &p = params[pi];
    const double lr = p.group == ParamGroup::kLower ? lower_lr_ : upper_lr_;
    Vector &m = m_[pi];
    Vector &v = v_[pi];
    for (size_t k = 0; k < p.size(); ++k) {
      const double g = p.grad[k];
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
      p.value[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
    }
  }
}

std::vector<Clustering> PredictCorpus(const Model &model,
                                      const std::vector<Document> &docs) {
  std::vector<Clustering> out;
  out.reserve(docs.size());
  for (const Document &doc : docs) {
    out.push_back(ClustersFromLinks(DecodeAntecedents(model.ScoreDocument(doc))));
  }
  return out;
}

MetricReport EvaluateCorpus(const Model &model, const std::vector<Document> &docs) {
  CorefCounts total;
  for (const Document &doc : docs) {
    total += CountCoref(GoldClustering(doc),
                        ClustersFromLinks(DecodeAntecedents(model.ScoreDocument(doc))));
  }
  return ReportFromCounts(total);
}

TrainHistory Train(Model &model, const std::vector<Document> &train,
                   const std::vector<Document> *dev, const TrainConfig &config,
                   const NoiseConfig &noise,
                   const std::function<void(const EpochInfo &)> &on_epoch) {
  if (train.empty()) throw std::invalid_argument("Train: empty training corpus");
  if (config.batch_size < 1) throw std::invalid_argument("Train: batch size must be >= 1");
  if (!(config.lower_lr > 0.0) || !(config.upper_lr > 0.0)) {
    throw std::invalid_argument("Train: learning rates must be positive");
  }
  if (config.epochs < 0) throw std::invalid_argument("Train: epochs must be >= 0");
  const FeatureSchema &schema = model.schema();
  if (config.noise) noise.Validate(schema);
  for (const Document &doc : train) {
    const std::string problem = ValidateDocument(doc, schema);
    if (!problem.empty()) {
      throw std::invalid_argument("Train: document " + doc.doc_id + ": " + problem);
    }
    GoldClusterIds(doc);
  }

  TrainHistory history;
  {
    double total = 0.0;
    for (const Document &doc : train) {
      total += AntecedentNll(model.ScoreDocument(doc), GoldClusterIds(doc));
    }
    history.initial_loss = total / static_cast<double>(train.size());
  }

  std::vector<Vector> best = model.store().Snapshot();
  double best_avg = -1.0;
  if (dev != nullptr) {
    best_avg = EvaluateCorpus(model, *dev).avg;
    history.initial_dev_avg = best_avg;
  }

  std::mt19937_64 shuffle_rng(MixSeed(config.seed, 11));
  std::mt19937_64 noise_rng(MixSeed(config.seed, 12));
  AdamOptimizer adam(model.store(), config.lower_lr, config.upper_lr);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_total = 0.0;
    int batch_index = 0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      Tape tape(&model.store());
      std::vector<Var> losses;
      for (size_t b = begin; b < end; ++b) {
        const Document &doc = train[order[b]];
        if (config.noise) {
          losses.push_back(DocumentLoss(tape, model, ApplyNoise(doc, schema, noise, noise_rng)));
        } else {
          losses.push_back(DocumentLoss(tape, model, doc));
        }
      }
      const Var loss = tape.Sum(losses);
      const double value = tape.scalar(loss);
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_index));
      }
      epoch_total += value;
      tape.Backward(loss);
      adam.Step();
    }
    EpochInfo info;
    info.epoch = epoch;
    info.mean_loss = epoch_total / static_cast<double>(train.size());
    history.epoch_loss.push_back(info.mean_loss);
    if (dev != nullptr) {
      const double avg = EvaluateCorpus(model, *dev).avg;
      history.dev_avg.push_back(avg);
      info.dev_avg = avg;
      if (avg > best_avg) {
        best_avg = avg;
        best = model.store().Snapshot();
        history.best_epoch = epoch;
      }
    }
    if (on_epoch) on_epoch(info);
  }
  if (dev != nullptr) {
    model.store().Restore(best);
  } else {
    history.best_epoch = config.epochs;
  }
  return history;
}

}  // namespace evcoref
