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

#include "evcoref/experiment.h"

#include <cstdio>
#include <sstream>

#include "evcoref/model.h"
#include "evcoref/synthetic.h"
#include "evcoref/training.h"
#include "json.hpp"

namespace evcoref {

Corpora GenerateCorpora(const RunConfig &config, uint64_t seed) {
  GenConfig gen = config.gen;
  gen.seed = seed;
  auto make = [&](Split split, int count) {
    GenConfig g = gen;
    g.num_documents = count;
    return CorruptFeatures(GenerateCorpus(g, config.schema, split), config.schema,
                           SplitAccuracies(g, config.schema, split),
                           MixSeed(seed, 100 + static_cast<uint64_t>(split)));
  };
  Corpora c;
  c.train = make(Split::kTrain, config.sizes.train);
  c.dev = make(Split::kDev, config.sizes.dev);
  c.test = make(Split::kTest, config.sizes.test);
  return c;
}

const VariantResult *ExperimentResult::Find(const std::string &variant) const {
  for (const VariantResult &r : rows) {
    if (r.variant == variant) return &r;
  }
  return nullptr;
}

ExperimentResult RunExperiment(const RunConfig &config) {
  ExperimentResult result;
  for (const Variant &v : config.experiment.variants) {
    VariantResult row;
    row.variant = v.name;
    result.rows.push_back(row);
  }
  for (int r = 0; r < config.experiment.repetitions; ++r) {
    const uint64_t seed = config.experiment.seed + static_cast<uint64_t>(r);
    result.seeds.push_back(seed);
    const Corpora corpora = GenerateCorpora(config, seed);
    const Vocabulary vocab = Vocabulary::FromCorpus(corpora.train);
    for (size_t vi = 0; vi < config.experiment.variants.size(); ++vi) {
      const Variant &variant = config.experiment.variants[vi];
      Model model(config.schema, vocab, config.dims, variant.mode);
      model.InitializeRandom(seed);
      TrainConfig train = config.train;
      train.seed = seed;
      train.noise = variant.noise;
      Train(model, corpora.train, &corpora.dev, train, config.noise);
      const MetricReport report = EvaluateCorpus(model, corpora.test);
      result.rows[vi].conll.push_back(report.conll);
      result.rows[vi].avg.push_back(report.avg);
    }
  }
  for (VariantResult &row : result.rows) {
    for (size_t i = 0; i < row.avg.size(); ++i) {
      row.mean_conll += row.conll[i];
      row.mean_avg += row.avg[i];
    }
    row.mean_conll /= static_cast<double>(row.avg.size());
    row.mean_avg /= static_cast<double>(row.avg.size());
  }
  return result;
}

std::string FormatExperimentTable(const ExperimentResult &result) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-14s %8s %8s\n", "variant", "CoNLL", "AVG");
  out << line;
  for (const VariantResult &row : result.rows) {
    std::snprintf(line, sizeof(line), "%-14s %8.2f %8.2f\n", row.variant.c_str(),
                  100.0 * row.mean_conll, 100.0 * row.mean_avg);
    out << line;
  }
  out << "(mean over " << result.seeds.size() << " repetition"
      << (result.seeds.size() == 1 ? "" : "s") << ")\n";
  return out.str();
}

std::string ExperimentToJson(const ExperimentResult &result,
                             const std::string &config_hash) {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["seeds"] = result.seeds;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const VariantResult &row : result.rows) {
    rows.push_back({{"variant", row.variant},
                    {"mean_conll", row.mean_conll},
                    {"mean_avg", row.mean_avg},
                    {"conll", row.conll},
                    {"avg", row.avg}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace evcoref
