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

#include "evcoref/pair_model.h"

#include <algorithm>
#include <stdexcept>

namespace evcoref {

const char *PairModeName(PairMode mode) {
  switch (mode) {
    case PairMode::kBaseline:
      return "baseline";
    case PairMode::kSimple:
      return "simple";
    case PairMode::kCdgm:
      return "cdgm";
  }
  return "unknown";
}

PairMode ParsePairMode(const std::string &name) {
  if (name == "baseline") return PairMode::kBaseline;
  if (name == "simple") return PairMode::kSimple;
  if (name == "cdgm") return PairMode::kCdgm;
  throw std::invalid_argument("unknown mode: " + name +
                              " (expected baseline|simple|cdgm)");
}

int FFNNBlock::HiddenWidth(int out) { return std::max(2 * out, 32); }

FFNNBlock FFNNBlock::Create(ParameterStore &store, const std::string &prefix,
                            int in, int out, bool sigmoid_output) {
  if (in <= 0 || out <= 0) {
    throw std::invalid_argument(prefix + ": widths must be positive");
  }
  const int hidden = HiddenWidth(out);
  FFNNBlock b;
  b.w1 = &store.Add(prefix + "/w1", hidden, in, ParamGroup::kUpper);
  b.b1 = &store.Add(prefix + "/b1", hidden, 1, ParamGroup::kUpper);
  b.w2 = &store.Add(prefix + "/w2", out, hidden, ParamGroup::kUpper);
  b.b2 = &store.Add(prefix + "/b2", out, 1, ParamGroup::kUpper);
  b.sigmoid_output = sigmoid_output;
  return b;
}

Var FFNNBlock::Apply(Tape &tape, Var x) const {
  Var h = tape.Relu(tape.Affine(*w1, *b1, x));
  Var y = tape.Affine(*w2, *b2, h);
  return sigmoid_output ? tape.Sigmoid(y) : y;
}

PairModelParams PairModelParams::Create(
    ParameterStore &store, const std::vector<std::string> &feature_names,
    int trigger_dim, int feature_dim, int pair_dim, PairMode mode) {
  PairModelParams p;
  p.mode = mode;
  p.trigger = FFNNBlock::Create(store, "ffnn_t", 3 * trigger_dim, pair_dim, false);
  int slots = 1;
  if (mode != PairMode::kBaseline) {
    for (const std::string &name : feature_names) {
      p.feature.push_back(FFNNBlock::Create(store, "ffnn_u/" + name,
                                            3 * feature_dim, pair_dim, false));
    }
    if (mode == PairMode::kCdgm) {
      for (const std::string &name : feature_names) {
        p.gate.push_back(FFNNBlock::Create(store, "ffnn_g/" + name,
                                           2 * pair_dim, pair_dim, true));
      }
    }
    slots += static_cast<int>(feature_names.size());
  }
  p.scorer = FFNNBlock::Create(store, "ffnn_a", slots * pair_dim, 1, false);
  return p;
}

namespace {

Var PairInput(Tape &tape, Var a, Var b) {
  const Var parts[] = {a, b, tape.Mul(a, b)};
  return tape.Concat(parts);
}

}  // namespace

Var TriggerPair(Tape &tape, Var t_i, Var t_j, const PairModelParams &params) {
  const size_t d = params.trigger.in_width() / 3;
  if (tape.value(t_i).size() != d || tape.value(t_j).size() != d) {
    throw ShapeError("TriggerPair: expected trigger vectors of width " +
                     std::to_string(d));
  }
  return params.trigger.Apply(tape, PairInput(tape, t_i, t_j));
}

Var FeaturePair(Tape &tape, Var h_i, Var h_j, const PairModelParams &params,
                int u) {
  if (u < 0 || u >= params.num_features()) {
    throw std::out_of_range("FeaturePair: feature index " + std::to_string(u) +
                            " out of range");
  }
  const FFNNBlock &block = params.feature[u];
  const size_t l = block.in_width() / 3;
  if (tape.value(h_i).size() != l || tape.value(h_j).size() != l) {
    throw ShapeError("FeaturePair: expected feature vectors of width " +
                     std::to_string(l));
  }
  return block.Apply(tape, PairInput(tape, h_i, h_j));
}

GatedFeature Cdgm(Tape &tape, Var t_ij, Var h_ij, const PairModelParams &params,
                  int u) {
  if (u < 0 || u >= static_cast<int>(params.gate.size())) {
    throw std::out_of_range("Cdgm: feature index " + std::to_string(u) +
                            " out of range");
  }
  const Var both[] = {t_ij, h_ij};
  GatedFeature out;
  out.gate = params.gate[u].Apply(tape, tape.Concat(both));
  const Tape::Decomposition parts = tape.Decompose(t_ij, h_ij);
  out.parallel = parts.parallel;
  out.orthogonal = parts.orthogonal;
  out.output = tape.Add(tape.Mul(out.gate, parts.orthogonal),
                        tape.Mul(tape.OneMinus(out.gate), parts.parallel));
  return out;
}

Var AssemblePair(Tape &tape, Var t_ij, const std::vector<Var> &features,
                 const PairModelParams &params) {
  const size_t expected =
      params.mode == PairMode::kBaseline ? 0 : params.feature.size();
  if (features.size() != expected) {
    throw std::invalid_argument("AssemblePair: " + std::string(PairModeName(params.mode)) +
                                " expects " + std::to_string(expected) +
                                " feature slots, got " +
                                std::to_string(features.size()));
  }
  if (features.empty()) return t_ij;
  std::vector<Var> parts;
  parts.reserve(features.size() + 1);
  parts.push_back(t_ij);
  parts.insert(parts.end(), features.begin(), features.end());
  return tape.Concat(parts);
}

Var ScorePair(Tape &tape, Var f_ij, const PairModelParams &params) {
  if (tape.value(f_ij).size() != static_cast<size_t>(params.scorer.in_width())) {
    throw ShapeError("ScorePair: pair representation width " +
                     std::to_string(tape.value(f_ij).size()) +
                     " vs scorer input " +
                     std::to_string(params.scorer.in_width()));
  }
  return params.scorer.Apply(tape, f_ij);
}

}  // namespace evcoref
