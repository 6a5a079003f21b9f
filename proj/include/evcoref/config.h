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

#ifndef EVCOREF_CONFIG_H_
#define EVCOREF_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evcoref/corpus.h"
#include "evcoref/model.h"
#include "evcoref/pair_model.h"
#include "evcoref/synthetic.h"
#include "evcoref/training.h"

namespace evcoref {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One variant of the ablation grid.
struct Variant {
  std::string name;  // e.g. "cdgm+noise"
  PairMode mode = PairMode::kCdgm;
  bool noise = false;
};

// Parses "baseline", "simple", "simple+noise", "cdgm", "cdgm+noise".
Variant ParseVariant(const std::string &name);

struct ExperimentSpec {
  std::vector<Variant> variants;
  int repetitions = 5;
  // Repetition r uses corpus and model seed `seed + r`.
  uint64_t seed = 1;
};

struct SplitSizes {
  int train = 200;
  int dev = 60;
  int test = 100;
};

struct RunConfig {
  std::string schema_path;  // empty: built-in five-feature schema
  FeatureSchema schema = FeatureSchema::AceDefault();
  std::string out_dir = ".";
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string model_path;
  PairMode mode = PairMode::kCdgm;
  ModelDims dims;
  GenConfig gen;
  SplitSizes sizes;
  TrainConfig train;
  NoiseConfig noise = NoiseConfig::AceDefault();
  ExperimentSpec experiment;
  uint64_t seed = 1;
  bool drop_singletons = false;

  // FNV-1a of the canonical JSON form.
  std::string Hash() const;
};

// Defaults, then the JSON file (if any), then `--set key=value` overrides
// (dotted keys; values parsed as JSON, falling back to a string), then the
// seed override. The out_dir default comes from EVCOREF_OUT_DIR when set.
// Relative corpus/model paths resolve against out_dir.
RunConfig LoadRunConfig(const std::string &config_path,
                        const std::vector<std::string> &overrides,
                        std::optional<uint64_t> seed_override);

// Canonical JSON of every field.
std::string RunConfigToJson(const RunConfig &config);

}  // namespace evcoref

#endif  // EVCOREF_CONFIG_H_
