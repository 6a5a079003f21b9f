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

// Command-line entry point: gen, train, predict, score, gradcheck,
// experiment.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evcoref/commands.h"
#include "evcoref/config.h"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App *cmd, CommonFlags *flags) {
  cmd->add_option("--config", flags->config_path, "Run configuration JSON");
  cmd->add_option("--seed", flags->seed, "Seed override");
  cmd->add_option("--set", flags->overrides, "Override key=value (dotted keys)")
      ->take_all();
}

std::string OneLine(std::string text) {
  for (char &c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Event coreference with gated symbolic-feature fusion"};
  app.require_subcommand(1);

  CommonFlags flags;
  evcoref::PredictOptions predict_options;
  evcoref::GradcheckCommandOptions gradcheck_options;
  std::string key_path, response_path, score_output;
  bool drop_singletons = false;
  bool print_config = false;

  auto *gen = app.add_subcommand("gen", "Generate synthetic train/dev/test corpora");
  auto *train = app.add_subcommand("train", "Train a model with dev-AVG selection");
  auto *predict = app.add_subcommand("predict", "Decode clusters for a corpus");
  auto *score = app.add_subcommand("score", "Score response clusterings against a key");
  auto *gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  auto *experiment = app.add_subcommand("experiment", "Run the ablation grid");
  for (CLI::App *cmd : {gen, train, predict, score, gradcheck, experiment}) {
    AddCommon(cmd, &flags);
    cmd->add_flag("--print-config", print_config, "Print the resolved config");
  }
  predict->add_option("--input", predict_options.input, "Corpus to decode");
  predict->add_option("--output", predict_options.output, "Response JSONL path");
  predict->add_flag("--drop-singletons", drop_singletons,
                    "Omit single-mention clusters from the output");
  score->add_option("--key", key_path, "Key clusterings JSONL")->required();
  score->add_option("--response", response_path, "Response clusterings JSONL")
      ->required();
  score->add_option("--output", score_output,
                    "Report JSON path (default <out_dir>/score.json)");
  gradcheck->add_option("--features", gradcheck_options.num_features,
                        "Number of schema features to include");
  gradcheck->add_option("--corrupt-block", gradcheck_options.corrupt_block,
                        "Perturb the analytic gradient of a block (test hook)");

  CLI11_PARSE(app, argc, argv);

  CLI::App *cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    evcoref::RunConfig config =
        evcoref::LoadRunConfig(flags.config_path, flags.overrides, flags.seed);
    if (drop_singletons) config.drop_singletons = true;
    if (print_config) std::cerr << evcoref::RunConfigToJson(config) << "\n";

    if (cmd == gen) {
      std::cout << evcoref::CmdGen(config);
    } else if (cmd == train) {
      std::cout << evcoref::CmdTrain(config);
    } else if (cmd == predict) {
      std::cout << evcoref::CmdPredict(config, predict_options);
    } else if (cmd == score) {
      if (score_output.empty()) score_output = config.out_dir + "/score.json";
      std::cout << evcoref::CmdScore(key_path, response_path, score_output,
                                     config.Hash());
    } else if (cmd == gradcheck) {
      const evcoref::GradcheckOutcome outcome =
          evcoref::CmdGradcheck(config, gradcheck_options);
      std::cout << outcome.text;
      if (!outcome.report.passed) {
        std::string failed;
        for (const auto &b : outcome.report.blocks) {
          if (!b.passed) failed += (failed.empty() ? "" : ",") + b.name;
        }
        std::cerr << "error: gradcheck: gradient mismatch in blocks " << failed
                  << "\n";
        return 1;
      }
    } else if (cmd == experiment) {
      std::cout << evcoref::CmdExperiment(config);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << name << ": " << OneLine(e.what()) << "\n";
    return 1;
  }
  return 0;
}
