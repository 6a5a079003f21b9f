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

#include "evcoref/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace evcoref {
namespace {

bool InRange(const IntRange &r) { return r.min <= r.max; }

void CheckProbability(const char *field, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(field) + " must be in [0, 1]");
  }
}

int Uniform(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool Bernoulli(std::mt19937_64 &rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Value of a trigger-determined feature for a trigger lemma. Independent of
// the corpus seed so the association holds across splits.
int LemmaValue(int trigger, int feature, int cardinality) {
  return 1 + static_cast<int>(MixSeed(static_cast<uint64_t>(trigger),
                                      0x7f4a7c15ULL + feature) %
                              static_cast<uint64_t>(cardinality));
}

}  // namespace

const char *SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> AceTrainAccuracies() {
  return {0.999, 0.999, 0.999, 0.999, 0.984};
}

std::vector<double> AceTestAccuracies() {
  return {0.953, 0.988, 0.884, 0.872, 0.763};
}

void ValidateGenConfig(const GenConfig &config, const FeatureSchema &schema) {
  if (config.num_documents < 0) {
    throw std::invalid_argument("num_documents must be >= 0");
  }
  if (!InRange(config.tokens_per_doc) || config.tokens_per_doc.min < 1) {
    throw std::invalid_argument("tokens_per_doc must be a non-empty range >= 1");
  }
  if (!InRange(config.mentions_per_doc) || config.mentions_per_doc.min < 1) {
    throw std::invalid_argument(
        "mentions_per_doc must be a non-empty range >= 1");
  }
  if (!InRange(config.clusters_per_doc) || config.clusters_per_doc.min < 1) {
    throw std::invalid_argument(
        "clusters_per_doc must be a non-empty range >= 1");
  }
  if (config.clusters_per_doc.min > config.mentions_per_doc.min) {
    throw std::invalid_argument(
        "infeasible ranges: clusters_per_doc.min exceeds mentions_per_doc.min");
  }
  if (config.vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
  if (config.trigger_vocab < config.clusters_per_doc.max) {
    throw std::invalid_argument(
        "trigger_vocab must be at least clusters_per_doc.max");
  }
  CheckProbability("trigger_ambiguity", config.trigger_ambiguity);
  CheckProbability("cue_rate", config.cue_rate);
  CheckProbability("multi_token_rate", config.multi_token_rate);
  for (const auto *acc : {&config.train_accuracy, &config.test_accuracy}) {
    if (acc->size() > static_cast<size_t>(schema.size())) {
      throw std::invalid_argument("more accuracies than schema features");
    }
    for (double a : *acc) CheckProbability("feature accuracy", a);
  }
}

std::vector<double> SplitAccuracies(const GenConfig &config,
                                    const FeatureSchema &schema, Split split) {
  std::vector<double> acc = split == Split::kTrain ? config.train_accuracy
                                                   : config.test_accuracy;
  acc.resize(schema.size(), 1.0);
  return acc;
}

std::vector<Document> GenerateCorpus(const GenConfig &config,
                                     const FeatureSchema &schema, Split split) {
  ValidateGenConfig(config, schema);
  const int num_features = schema.size();
  std::vector<bool> determined(num_features, false);
  for (const std::string &name : config.trigger_determined_features) {
    const int u = schema.IndexOf(name);
    if (u >= 0) determined[u] = true;
  }

  std::vector<Document> docs;
  docs.reserve(config.num_documents);
  const uint64_t split_stream = static_cast<uint64_t>(split) + 1;
  for (int d = 0; d < config.num_documents; ++d) {
    std::mt19937_64 rng(
        MixSeed(MixSeed(config.seed, split_stream), static_cast<uint64_t>(d)));
    const int k = Uniform(rng, config.mentions_per_doc.min,
                          config.mentions_per_doc.max);
    const int c = Uniform(rng, config.clusters_per_doc.min,
                          std::min(config.clusters_per_doc.max, k));

    // Every event gets at least one mention; positions are shuffled.
    std::vector<int> event_of(k);
    for (int i = 0; i < k; ++i) event_of[i] = i < c ? i : Uniform(rng, 0, c - 1);
    std::shuffle(event_of.begin(), event_of.end(), rng);

    std::vector<int> pool(config.trigger_vocab);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<int> trigger(pool.begin(), pool.begin() + c);

    std::vector<std::vector<int>> values(c, std::vector<int>(num_features));
    for (int e = 0; e < c; ++e) {
      for (int u = 0; u < num_features; ++u) {
        values[e][u] = determined[u]
                           ? LemmaValue(trigger[e], u, schema[u].cardinality)
                           : Uniform(rng, 1, schema[u].cardinality);
      }
    }

    if (c >= 2 && Bernoulli(rng, config.trigger_ambiguity)) {
      // A group of events shares the trigger of its first member; each
      // member's feature vector differs from every other member's.
      const int group_size = std::min(c, std::max(2, config.shared_trigger_events));
      std::vector<int> events(c);
      std::iota(events.begin(), events.end(), 0);
      std::shuffle(events.begin(), events.end(), rng);
      const int lead = events[0];
      const bool can_differ =
          std::find(determined.begin(), determined.end(), false) !=
          determined.end();
      for (int g = 1; g < group_size; ++g) {
        const int b = events[g];
        trigger[b] = trigger[lead];
        for (int attempt = 0;; ++attempt) {
          for (int u = 0; u < num_features; ++u) {
            values[b][u] = determined[u] ? values[lead][u]
                                         : Uniform(rng, 1, schema[u].cardinality);
          }
          bool distinct = true;
          for (int h = 0; h < g; ++h) distinct = distinct && values[b] != values[events[h]];
          if (distinct || !can_differ || attempt >= 1000) break;
        }
      }
    }

    // Lay out [filler] [cue] trigger [particle] segments.
    struct Slot {
      int cue_feature = -1;
      bool particle = false;
    };
    std::vector<Slot> slots(k);
    int used = 0;
    for (int i = 0; i < k; ++i) {
      if (num_features > 0 && Bernoulli(rng, config.cue_rate)) {
        slots[i].cue_feature = Uniform(rng, 0, num_features - 1);
      }
      slots[i].particle = Bernoulli(rng, config.multi_token_rate);
      used += 2 + (slots[i].cue_feature >= 0) + slots[i].particle;
    }
    const int n = std::max(
        Uniform(rng, config.tokens_per_doc.min, config.tokens_per_doc.max),
        used);
    std::vector<int> gap(k + 1, 0);
    for (int i = 0; i < k; ++i) gap[i] = 1;
    for (int s = 0; s < n - used; ++s) gap[Uniform(rng, 0, k)]++;

    Document doc;
    char id[32];
    std::snprintf(id, sizeof(id), "%s-%05d", SplitName(split), d);
    doc.doc_id = id;
    auto filler = [&]() {
      doc.tokens.push_back("w" +
                           std::to_string(Uniform(rng, 0, config.vocab_size - 1)));
    };
    for (int i = 0; i < k; ++i) {
      for (int g = 0; g < gap[i]; ++g) filler();
      const int e = event_of[i];
      if (slots[i].cue_feature >= 0) {
        const int u = slots[i].cue_feature;
        doc.tokens.push_back("cue:" + schema[u].name + "=" +
                             std::to_string(values[e][u]));
      }
      Mention m;
      m.start = static_cast<int>(doc.tokens.size());
      doc.tokens.push_back("t" + std::to_string(trigger[e]));
      if (slots[i].particle) {
        doc.tokens.push_back("p" + std::to_string(trigger[e] % 7));
      }
      m.end = static_cast<int>(doc.tokens.size()) - 1;
      m.features = values[e];
      m.true_features = values[e];
      m.gold_cluster = e;
      doc.mentions.push_back(std::move(m));
    }
    for (int g = 0; g < gap[k]; ++g) filler();

    // Renumber clusters by first appearance.
    std::vector<int> remap(c, -1);
    int next = 0;
    for (Mention &m : doc.mentions) {
      int &r = remap[*m.gold_cluster];
      if (r < 0) r = next++;
      m.gold_cluster = r;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> CorruptFeatures(std::vector<Document> docs,
                                      const FeatureSchema &schema,
                                      const std::vector<double> &accuracies,
                                      uint64_t seed) {
  if (accuracies.size() != static_cast<size_t>(schema.size())) {
    throw std::invalid_argument("CorruptFeatures: need one accuracy per feature");
  }
  for (double a : accuracies) CheckProbability("feature accuracy", a);
  for (size_t d = 0; d < docs.size(); ++d) {
    std::mt19937_64 rng(MixSeed(seed, d));
    for (Mention &m : docs[d].mentions) {
      if (!m.true_features) m.true_features = m.features;
      for (int u = 0; u < schema.size(); ++u) {
        const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const int other = Uniform(rng, 1, schema[u].cardinality - 1);
        if (draw < accuracies[u]) continue;
        const int truth = (*m.true_features)[u];
        m.features[u] = other >= truth ? other + 1 : other;
      }
    }
  }
  return docs;
}

}  // namespace evcoref
