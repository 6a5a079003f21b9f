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

#ifndef EVCOREF_GRADCHECK_H_
#define EVCOREF_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "evcoref/autodiff.h"

namespace evcoref {

// Builds a scalar loss on the given tape. Must be deterministic in the
// parameter values.
using LossBuilder = std::function<Var(Tape &)>;

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Parameters are grouped into blocks by the text before the first '/'.
  // Listed blocks with no scalars show up in GradCheckReport::skipped.
  std::vector<std::string> expected_blocks;
  // Test hook: runs on the store after the analytic backward pass, before
  // comparison, so a corrupted gradient can be injected.
  std::function<void(ParameterStore &)> corrupt_analytic;
};

struct GradCheckBlock {
  std::string name;
  size_t num_scalars = 0;
  double max_rel_error = 0.0;
  double max_abs_analytic = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  std::vector<std::string> skipped;
  double worst = 0.0;
  bool passed = true;
};

// Block name of a parameter: the prefix before the first '/'.
std::string BlockOf(const std::string &param_name);

// |a - n| / max(|a|, |n|, 1e-8).
double RelativeError(double analytic, double numeric);

// Compares the tape gradient of `build` against central differences for
// every scalar in `store`. Throws std::runtime_error if two evaluations at
// the unperturbed point differ.
GradCheckReport GradCheck(const LossBuilder &build, ParameterStore &store,
                          const GradCheckOptions &options = {});

}  // namespace evcoref

#endif  // EVCOREF_GRADCHECK_H_
