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

#ifndef EVCOREF_EXPERIMENT_H_
#define EVCOREF_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "evcoref/config.h"
#include "evcoref/corpus.h"

namespace evcoref {

struct Corpora {
  std::vector<Document> train;
  std::vector<Document> dev;
  std::vector<Document> test;
};

// Generated splits with observed (corrupted) features: train at the train
// accuracies, dev and test at the test accuracies.
Corpora GenerateCorpora(const RunConfig &config, uint64_t seed);

struct VariantResult {
  std::string variant;
  std::vector<double> conll;  // one per repetition
  std::vector<double> avg;
  double mean_conll = 0.0;
  double mean_avg = 0.0;
};

struct ExperimentResult {
  std::vector<uint64_t> seeds;
  std::vector<VariantResult> rows;

  const VariantResult *Find(const std::string &variant) const;
};

// For each repetition r: one corpus from seed + r shared by every variant;
// each variant trains from the same seed with dev-AVG model selection and
// is scored on test.
ExperimentResult RunExperiment(const RunConfig &config);

// Plain-text table: variant, CoNLL and AVG means (percent).
std::string FormatExperimentTable(const ExperimentResult &result);
std::string ExperimentToJson(const ExperimentResult &result,
                             const std::string &config_hash);

}  // namespace evcoref

#endif  // EVCOREF_EXPERIMENT_H_
