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

#include "evcoref/model.h"

#include <cmath>
#include <random>

namespace evcoref {
namespace {

bool IsBias(const Parameter &p) {
  return p.cols == 1 && (p.name.ends_with("/b1") || p.name.ends_with("/b2") ||
                         p.name.ends_with("_bias"));
}

}  // namespace

Model::Model(FeatureSchema schema, Vocabulary vocab, ModelDims dims,
             PairMode mode)
    : schema_(std::move(schema)), vocab_(std::move(vocab)), dims_(dims) {
  encoder_ = EncoderParams::Create(store_, vocab_.size(), dims_.token_dim,
                                   dims_.window);
  std::vector<std::string> names;
  if (mode != PairMode::kBaseline) {
    embedders_ = FeatureEmbedders::Create(store_, schema_, dims_.feature_dim);
    for (const auto &f : schema_.features()) names.push_back(f.name);
  }
  pair_ = PairModelParams::Create(store_, names, dims_.token_dim,
                                  dims_.feature_dim, dims_.pair_dim, mode);
}

void Model::InitializeRandom(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (Parameter &p : store_.params()) {
    if (IsBias(p)) {
      std::fill(p.value.begin(), p.value.end(), 0.0);
      continue;
    }
    // Weights are out x fan_in and tables are rows x dim, so cols is the
    // scaling width for both.
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.cols));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double &v : p.value) v = dist(rng);
  }
}

void Model::InitializeWellScaled(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (Parameter &p : store_.params()) {
    const bool table = p.name.ends_with("_embedding") ||
                       p.name.starts_with("feature_embedding/");
    const double scale =
        table ? std::sqrt(3.0) : 1.5 / std::sqrt(static_cast<double>(p.cols));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double &v : p.value) v = dist(rng);
  }
}

void Model::InitializeZero() {
  for (Parameter &p : store_.params()) {
    std::fill(p.value.begin(), p.value.end(), 0.0);
  }
}

std::vector<Var> Model::BuildScores(Tape &tape, const Document &doc) const {
  const int k = static_cast<int>(doc.mentions.size());
  const int n = static_cast<int>(doc.tokens.size());
  const std::vector<int> ids = vocab_.Ids(doc.tokens);

  // Only positions inside a trigger span are encoded.
  std::vector<Var> x(n);
  for (const Mention &m : doc.mentions) {
    for (int p = m.start; p <= m.end; ++p) {
      if (x[p].id < 0) x[p] = EncodeToken(tape, ids, p, encoder_);
    }
  }
  std::vector<Var> trig(k);
  std::vector<std::vector<Var>> feats(k);
  const bool use_features = pair_.mode != PairMode::kBaseline;
  for (int i = 0; i < k; ++i) {
    trig[i] = TriggerRepr(tape, x, doc.mentions[i].start, doc.mentions[i].end);
    if (use_features) {
      feats[i] = EmbedFeatures(tape, doc.mentions[i].features, embedders_);
    }
  }

  // h_ij^(u) depends only on the two feature values, so it is shared by
  // every pair with the same values.
  const int num_features = pair_.num_features();
  std::vector<std::vector<Var>> feature_pair_cache(num_features);
  for (int u = 0; u < num_features; ++u) {
    const int card = schema_[u].cardinality;
    feature_pair_cache[u].assign(static_cast<size_t>(card) * card, Var{});
  }

  std::vector<Var> scores;
  scores.reserve(k > 1 ? static_cast<size_t>(k) * (k - 1) / 2 : 0);
  std::vector<Var> slots(num_features);
  for (int i = 1; i < k; ++i) {
    for (int j = 0; j < i; ++j) {
      const Var t_ij = TriggerPair(tape, trig[i], trig[j], pair_);
      for (int u = 0; u < num_features; ++u) {
        const int card = schema_[u].cardinality;
        const int ci = doc.mentions[i].features[u];
        const int cj = doc.mentions[j].features[u];
        Var &h_ij = feature_pair_cache[u][static_cast<size_t>(ci - 1) * card +
                                          (cj - 1)];
        if (h_ij.id < 0) h_ij = FeaturePair(tape, feats[i][u], feats[j][u], pair_, u);
        slots[u] = pair_.mode == PairMode::kCdgm
                       ? Cdgm(tape, t_ij, h_ij, pair_, u).output
                       : h_ij;
      }
      scores.push_back(ScorePair(tape, AssemblePair(tape, t_ij, slots, pair_), pair_));
    }
  }
  return scores;
}

PairScoreMatrix Model::ScoreDocument(const Document &doc) const {
  Tape tape(nullptr, /*recording=*/false);
  const std::vector<Var> vars = BuildScores(tape, doc);
  PairScoreMatrix out(static_cast<int>(doc.mentions.size()));
  for (size_t s = 0; s < vars.size(); ++s) {
    out.mutable_values()[s] = tape.scalar(vars[s]);
  }
  return out;
}

std::vector<std::string> Model::BlockNames() {
  return {"encoder", "feature_embedding", "ffnn_t", "ffnn_u", "ffnn_g", "ffnn_a"};
}

}  // namespace evcoref
