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

#include "evcoref/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace evcoref {
namespace {

double Evaluate(const LossBuilder &build, ParameterStore &store) {
  Tape tape(&store, /*recording=*/false);
  return tape.scalar(build(tape));
}

}  // namespace

std::string BlockOf(const std::string &param_name) {
  return param_name.substr(0, param_name.find('/'));
}

double RelativeError(double analytic, double numeric) {
  const double denom =
      std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
  return std::fabs(analytic - numeric) / denom;
}

GradCheckReport GradCheck(const LossBuilder &build, ParameterStore &store,
                          const GradCheckOptions &options) {
  if (!(options.step > 0.0)) {
    throw std::invalid_argument("GradCheck: step must be positive");
  }
  const double base = Evaluate(build, store);
  if (Evaluate(build, store) != base) {
    throw std::runtime_error(
        "GradCheck: non-deterministic closure (baseline evaluations differ)");
  }

  std::vector<Vector> analytic;
  {
    Tape tape(&store);
    Var loss = build(tape);
    tape.Backward(loss);
    if (options.corrupt_analytic) options.corrupt_analytic(store);
    for (const Parameter &p : store.params()) analytic.push_back(p.grad);
  }

  GradCheckReport report;
  std::map<std::string, size_t> index;
  auto block_for = [&](const std::string &name) -> GradCheckBlock & {
    auto [it, inserted] = index.emplace(name, report.blocks.size());
    if (inserted) report.blocks.push_back(GradCheckBlock{name});
    return report.blocks[it->second];
  };

  auto &params = store.params();
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Parameter &p = params[pi];
    if (p.size() == 0) continue;
    GradCheckBlock &block = block_for(BlockOf(p.name));
    for (size_t k = 0; k < p.size(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + options.step;
      const double up = Evaluate(build, store);
      p.value[k] = saved - options.step;
      const double down = Evaluate(build, store);
      p.value[k] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[pi][k];
      block.num_scalars++;
      block.max_rel_error = std::max(block.max_rel_error, RelativeError(a, numeric));
      block.max_abs_analytic = std::max(block.max_abs_analytic, std::fabs(a));
    }
  }

  for (GradCheckBlock &b : report.blocks) {
    b.passed = b.max_rel_error < options.tolerance;
    report.passed = report.passed && b.passed;
    report.worst = std::max(report.worst, b.max_rel_error);
  }
  for (const std::string &name : options.expected_blocks) {
    if (index.find(name) == index.end()) report.skipped.push_back(name);
  }
  return report;
}

}  // namespace evcoref
