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

#ifndef EVCOREF_MODEL_H_
#define EVCOREF_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "evcoref/autodiff.h"
#include "evcoref/corpus.h"
#include "evcoref/encoder.h"
#include "evcoref/pair_model.h"

namespace evcoref {

struct ModelDims {
  int token_dim = 64;    // d
  int feature_dim = 16;  // l
  int pair_dim = 32;     // p
  int window = 2;        // w

  bool operator==(const ModelDims &) const = default;
};

// Encoder, feature embedders and pair scorer over one ParameterStore.
// Not copyable: the component structs point into the store.
class Model {
 public:
  Model(FeatureSchema schema, Vocabulary vocab, ModelDims dims, PairMode mode);
  Model(const Model &) = delete;
  Model &operator=(const Model &) = delete;

  // Weights uniform in +-1/sqrt(fan_in), embeddings uniform in
  // +-1/sqrt(dim), biases zero.
  void InitializeRandom(uint64_t seed);
  // Unit-variance embedding tables, weights and biases in +-1.5/sqrt(fan_in).
  // Keeps every gradient well above the central-difference noise floor.
  void InitializeWellScaled(uint64_t seed);
  void InitializeZero();

  const FeatureSchema &schema() const { return schema_; }
  const Vocabulary &vocab() const { return vocab_; }
  const ModelDims &dims() const { return dims_; }
  PairMode mode() const { return pair_.mode; }
  ParameterStore &store() { return store_; }
  const ParameterStore &store() const { return store_; }
  const EncoderParams &encoder() const { return encoder_; }
  const FeatureEmbedders &embedders() const { return embedders_; }
  const PairModelParams &pair() const { return pair_; }

  // Records the full scoring pipeline for every pair j < i of `doc`.
  // Returned scores follow PairScoreMatrix::Index order.
  std::vector<Var> BuildScores(Tape &tape, const Document &doc) const;

  // Non-recording evaluation of BuildScores.
  PairScoreMatrix ScoreDocument(const Document &doc) const;

  // All gradient-check block names a model can have, whether or not this
  // instance uses them.
  static std::vector<std::string> BlockNames();

 private:
  FeatureSchema schema_;
  Vocabulary vocab_;
  ModelDims dims_;
  ParameterStore store_;
  EncoderParams encoder_;
  FeatureEmbedders embedders_;
  PairModelParams pair_;
};

}  // namespace evcoref

#endif  // EVCOREF_MODEL_H_
