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

#ifndef EVCOREF_SYNTHETIC_H_
#define EVCOREF_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "evcoref/corpus.h"

namespace evcoref {

struct IntRange {
  int min = 0;
  int max = 0;
};

enum class Split { kTrain, kDev, kTest };

const char *SplitName(Split split);

// Knobs of the synthetic event-coreference corpus. Each document holds a
// few latent events; every mention of an event uses the event's trigger
// token and shares its true feature values.
struct GenConfig {
  int num_documents = 200;
  IntRange tokens_per_doc{48, 80};
  IntRange mentions_per_doc{6, 12};
  IntRange clusters_per_doc{3, 6};
  // Filler words and trigger lemmas are separate pools.
  int vocab_size = 300;
  int trigger_vocab = 60;
  // Probability that a document puts several distinct events on one
  // trigger token. Such events have pairwise distinct feature vectors.
  double trigger_ambiguity = 0.5;
  // Number of events sharing the trigger in such a document (at least 2,
  // capped by the document's event count).
  int shared_trigger_events = 6;
  // Probability that a mention is preceded by a cue token revealing one of
  // its true feature values.
  double cue_rate = 0.3;
  // Probability that a trigger span has a second (particle) token.
  double multi_token_rate = 0.2;
  // Features whose true value is a fixed function of the trigger lemma.
  std::vector<std::string> trigger_determined_features{"Type"};
  // Observation accuracy a_u per feature. Dev uses the test accuracies.
  std::vector<double> train_accuracy;
  std::vector<double> test_accuracy;
  uint64_t seed = 1;
};

// Throws std::invalid_argument naming the offending field.
void ValidateGenConfig(const GenConfig &config, const FeatureSchema &schema);

// Documents carry gold clusters and TRUE feature values. Pure function of
// (config, schema, split).
std::vector<Document> GenerateCorpus(const GenConfig &config,
                                     const FeatureSchema &schema, Split split);

// Per mention and feature: keeps the value with probability a_u, otherwise
// draws uniformly among the other N_u - 1 values. The input values are
// recorded in Mention::true_features unless already present.
std::vector<Document> CorruptFeatures(std::vector<Document> docs,
                                      const FeatureSchema &schema,
                                      const std::vector<double> &accuracies,
                                      uint64_t seed);

// Accuracies for a split (train vs. dev/test), padded to the schema size
// with 1.0.
std::vector<double> SplitAccuracies(const GenConfig &config,
                                    const FeatureSchema &schema, Split split);

// SplitMix64 mixing, used to derive independent sub-seeds.
uint64_t MixSeed(uint64_t seed, uint64_t stream);

// Train and test observation accuracies for the default schema.
std::vector<double> AceTrainAccuracies();
std::vector<double> AceTestAccuracies();

}  // namespace evcoref

#endif  // EVCOREF_SYNTHETIC_H_
