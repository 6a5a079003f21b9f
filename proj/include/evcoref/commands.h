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

#ifndef EVCOREF_COMMANDS_H_
#define EVCOREF_COMMANDS_H_

#include <stdexcept>
#include <string>

#include "evcoref/config.h"
#include "evcoref/gradcheck.h"

namespace evcoref {

// Failure of a command; the message is a single line.
class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Each command writes its artifacts under config.out_dir (or the explicit
// paths) and returns the text to print on stdout.

// train/dev/test corpora, schema.json and gen_manifest.json.
std::string CmdGen(const RunConfig &config);

// Model file at config.model_path and history.json.
std::string CmdTrain(const RunConfig &config);

struct PredictOptions {
  std::string input;   // default: config.test_path
  std::string output;  // default: <out_dir>/predictions.jsonl
};
// Response clusterings, plus key.jsonl when the input has gold clusters.
std::string CmdPredict(const RunConfig &config, const PredictOptions &options);

// Report JSON to `output_json` (skipped when empty); returns the table.
// Every key doc_id must appear in the response and vice versa.
std::string CmdScore(const std::string &key_path, const std::string &response_path,
                     const std::string &output_json,
                     const std::string &config_hash = "");

// Small enough that the check finishes in seconds; the window comes from the
// run config.
inline constexpr ModelDims kGradcheckDims{8, 4, 8, 2};

struct GradcheckCommandOptions {
  int num_features = 2;
  // Test hook: perturbs the analytic gradient of this block.
  std::string corrupt_block;
};
struct GradcheckOutcome {
  GradCheckReport report;
  std::string text;
};
GradcheckOutcome CmdGradcheck(const RunConfig &config,
                              const GradcheckCommandOptions &options);

// experiment.json; returns the table.
std::string CmdExperiment(const RunConfig &config);

// Three-mention document (gold clusters {0, 0, 1}, one two-token span) used
// by the gradient check.
Document GradcheckDocument(const FeatureSchema &schema, uint64_t seed);

}  // namespace evcoref

#endif  // EVCOREF_COMMANDS_H_
