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

#ifndef EVCOREF_ENCODER_H_
#define EVCOREF_ENCODER_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "evcoref/autodiff.h"
#include "evcoref/corpus.h"

namespace evcoref {

// Token inventory with a reserved unknown id 0.
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;
  static constexpr const char *kUnknownToken = "<unk>";

  Vocabulary();
  // Sorted distinct tokens of the corpus, after <unk>.
  static Vocabulary FromCorpus(const std::vector<Document> &docs);
  static Vocabulary FromTokens(const std::vector<std::string> &tokens);

  int Id(const std::string &token) const;
  std::vector<int> Ids(const std::vector<std::string> &tokens) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string> &tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Stand-in contextual encoder: x_i = ReLU(W [e_i ; mean(e_{i-w..i+w})] + b).
struct EncoderParams {
  Parameter *token_embedding = nullptr;  // vocab x d
  Parameter *mix_weight = nullptr;       // d x 2d
  Parameter *mix_bias = nullptr;         // d x 1
  int window = 2;

  static EncoderParams Create(ParameterStore &store, int vocab_size, int dim,
                              int window);
  int dim() const { return token_embedding->cols; }
};

// One N_u x l matrix per schema feature.
struct FeatureEmbedders {
  std::vector<Parameter *> tables;

  static FeatureEmbedders Create(ParameterStore &store,
                                 const FeatureSchema &schema, int dim);
  int size() const { return static_cast<int>(tables.size()); }
};

// Contextual vector of token `position`.
Var EncodeToken(Tape &tape, const std::vector<int> &token_ids, int position,
                const EncoderParams &params);
// All n token vectors; empty for an empty document.
std::vector<Var> EncodeTokens(Tape &tape, const std::vector<int> &token_ids,
                              const EncoderParams &params);

// Mean of x over the inclusive span [start, end].
Var TriggerRepr(Tape &tape, const std::vector<Var> &x, int start, int end);

// h^(u) = row (value - 1) of table u, for every feature.
std::vector<Var> EmbedFeatures(Tape &tape, const std::vector<int> &values,
                               const FeatureEmbedders &embedders);

}  // namespace evcoref

#endif  // EVCOREF_ENCODER_H_
