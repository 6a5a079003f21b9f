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

#ifndef EVCOREF_PAIR_MODEL_H_
#define EVCOREF_PAIR_MODEL_H_

#include <string>
#include <vector>

#include "evcoref/autodiff.h"

namespace evcoref {

enum class PairMode { kBaseline, kSimple, kCdgm };

const char *PairModeName(PairMode mode);
// Throws std::invalid_argument for unknown names.
PairMode ParsePairMode(const std::string &name);

// Two affine maps with a ReLU between, optionally followed by a sigmoid.
struct FFNNBlock {
  Parameter *w1 = nullptr;
  Parameter *b1 = nullptr;
  Parameter *w2 = nullptr;
  Parameter *b2 = nullptr;
  bool sigmoid_output = false;

  // Hidden width is max(2 * out, 32).
  static FFNNBlock Create(ParameterStore &store, const std::string &prefix,
                          int in, int out, bool sigmoid_output);
  static int HiddenWidth(int out);

  int in_width() const { return w1->cols; }
  int out_width() const { return w2->rows; }
  Var Apply(Tape &tape, Var x) const;
};

// Weights of the mention-pair encoder and scorer.
struct PairModelParams {
  PairMode mode = PairMode::kCdgm;
  FFNNBlock trigger;                 // 3d -> p
  std::vector<FFNNBlock> feature;    // 3l -> p, one per feature
  std::vector<FFNNBlock> gate;       // 2p -> p, sigmoid, cdgm mode only
  FFNNBlock scorer;                  // (K+1)p -> 1, or p -> 1 in baseline

  // Feature blocks are only created in simple and cdgm modes.
  static PairModelParams Create(ParameterStore &store,
                                const std::vector<std::string> &feature_names,
                                int trigger_dim, int feature_dim, int pair_dim,
                                PairMode mode);
  int num_features() const { return static_cast<int>(feature.size()); }
  int pair_dim() const { return trigger.out_width(); }
};

// t_ij = FFNN_t([t_i ; t_j ; t_i o t_j]).
Var TriggerPair(Tape &tape, Var t_i, Var t_j, const PairModelParams &params);

// h_ij = FFNN_u([h_i ; h_j ; h_i o h_j]).
Var FeaturePair(Tape &tape, Var h_i, Var h_j, const PairModelParams &params,
                int u);

struct GatedFeature {
  Var output;
  Var gate;
  Var parallel;
  Var orthogonal;
};

// Context-dependent gated fusion of one feature-pair vector:
//   g = sigmoid(FFNN_g([t_ij ; h_ij])), (p, o) = decompose(t_ij, h_ij),
//   output = g o o + (1 - g) o p.
GatedFeature Cdgm(Tape &tape, Var t_ij, Var h_ij, const PairModelParams &params,
                  int u);

// baseline: t_ij. simple: [t_ij ; h_ij^1 ; ...]. cdgm: [t_ij ; hbar^1 ; ...],
// where `features` holds the raw or gated vectors respectively. Throws if
// the count does not match the model's feature count.
Var AssemblePair(Tape &tape, Var t_ij, const std::vector<Var> &features,
                 const PairModelParams &params);

// s(i, j) = FFNN_a(f_ij).
Var ScorePair(Tape &tape, Var f_ij, const PairModelParams &params);

// Pair scores s(i, j) for j < i, stored row-major over the strict lower
// triangle.
class PairScoreMatrix {
 public:
  PairScoreMatrix() = default;
  explicit PairScoreMatrix(int num_mentions)
      : k_(num_mentions),
        values_(num_mentions > 1
                    ? static_cast<size_t>(num_mentions) * (num_mentions - 1) / 2
                    : 0,
                0.0) {}

  static size_t Index(int i, int j) {
    return static_cast<size_t>(i) * (i - 1) / 2 + j;
  }

  int num_mentions() const { return k_; }
  size_t num_scores() const { return values_.size(); }
  double at(int i, int j) const { return values_[Index(i, j)]; }
  double &at(int i, int j) { return values_[Index(i, j)]; }
  const std::vector<double> &values() const { return values_; }
  std::vector<double> &mutable_values() { return values_; }

 private:
  int k_ = 0;
  std::vector<double> values_;
};

}  // namespace evcoref

#endif  // EVCOREF_PAIR_MODEL_H_
