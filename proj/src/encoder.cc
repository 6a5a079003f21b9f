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

#include "evcoref/encoder.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace evcoref {

Vocabulary::Vocabulary() : tokens_{kUnknownToken} { index_[kUnknownToken] = 0; }

Vocabulary Vocabulary::FromCorpus(const std::vector<Document> &docs) {
  std::set<std::string> distinct;
  for (const Document &doc : docs) distinct.insert(doc.tokens.begin(), doc.tokens.end());
  distinct.erase(kUnknownToken);
  return FromTokens(std::vector<std::string>(distinct.begin(), distinct.end()));
}

Vocabulary Vocabulary::FromTokens(const std::vector<std::string> &tokens) {
  Vocabulary vocab;
  for (const std::string &t : tokens) {
    if (vocab.index_.emplace(t, vocab.size()).second) vocab.tokens_.push_back(t);
  }
  return vocab;
}

int Vocabulary::Id(const std::string &token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<int> Vocabulary::Ids(const std::vector<std::string> &tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string &t : tokens) ids.push_back(Id(t));
  return ids;
}

EncoderParams EncoderParams::Create(ParameterStore &store, int vocab_size,
                                    int dim, int window) {
  if (dim <= 0) throw std::invalid_argument("encoder dimension must be > 0");
  if (window < 0) throw std::invalid_argument("encoder window must be >= 0");
  EncoderParams p;
  p.token_embedding =
      &store.Add("encoder/token_embedding", vocab_size, dim, ParamGroup::kLower);
  p.mix_weight = &store.Add("encoder/mix_weight", dim, 2 * dim, ParamGroup::kLower);
  p.mix_bias = &store.Add("encoder/mix_bias", dim, 1, ParamGroup::kLower);
  p.window = window;
  return p;
}

FeatureEmbedders FeatureEmbedders::Create(ParameterStore &store,
                                          const FeatureSchema &schema, int dim) {
  if (dim <= 0) throw std::invalid_argument("feature dimension must be > 0");
  FeatureEmbedders e;
  for (const auto &f : schema.features()) {
    e.tables.push_back(&store.Add("feature_embedding/" + f.name, f.cardinality,
                                  dim, ParamGroup::kLower));
  }
  return e;
}

Var EncodeToken(Tape &tape, const std::vector<int> &token_ids, int position,
                const EncoderParams &params) {
  const int n = static_cast<int>(token_ids.size());
  if (position < 0 || position >= n) {
    throw std::out_of_range("EncodeToken: position out of range");
  }
  const int lo = std::max(0, position - params.window);
  const int hi = std::min(n - 1, position + params.window);
  std::vector<Var> window;
  window.reserve(hi - lo + 1);
  Var self{};
  for (int j = lo; j <= hi; ++j) {
    Var e = tape.Row(*params.token_embedding, token_ids[j]);
    if (j == position) self = e;
    window.push_back(e);
  }
  const Var context = tape.Mean(window);
  const Var both[] = {self, context};
  return tape.Relu(
      tape.Affine(*params.mix_weight, *params.mix_bias, tape.Concat(both)));
}

std::vector<Var> EncodeTokens(Tape &tape, const std::vector<int> &token_ids,
                              const EncoderParams &params) {
  std::vector<Var> x;
  x.reserve(token_ids.size());
  for (int i = 0; i < static_cast<int>(token_ids.size()); ++i) {
    x.push_back(EncodeToken(tape, token_ids, i, params));
  }
  return x;
}

Var TriggerRepr(Tape &tape, const std::vector<Var> &x, int start, int end) {
  if (start < 0 || end < start || end >= static_cast<int>(x.size())) {
    throw std::out_of_range("TriggerRepr: span [" + std::to_string(start) +
                            ", " + std::to_string(end) + "] outside " +
                            std::to_string(x.size()) + " tokens");
  }
  if (start == end) return x[start];
  return tape.Mean(std::span<const Var>(x.data() + start, end - start + 1));
}

std::vector<Var> EmbedFeatures(Tape &tape, const std::vector<int> &values,
                               const FeatureEmbedders &embedders) {
  if (static_cast<int>(values.size()) != embedders.size()) {
    throw std::invalid_argument("EmbedFeatures: expected " +
                                std::to_string(embedders.size()) +
                                " feature values, got " +
                                std::to_string(values.size()));
  }
  std::vector<Var> h;
  h.reserve(values.size());
  for (size_t u = 0; u < values.size(); ++u) {
    Parameter &table = *embedders.tables[u];
    if (values[u] < 1 || values[u] > table.rows) {
      throw std::out_of_range("EmbedFeatures: value " + std::to_string(values[u]) +
                              " outside 1.." + std::to_string(table.rows) +
                              " for " + table.name);
    }
    h.push_back(tape.Row(table, values[u] - 1));
  }
  return h;
}

}  // namespace evcoref
