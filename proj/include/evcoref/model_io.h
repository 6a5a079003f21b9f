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

#ifndef EVCOREF_MODEL_IO_H_
#define EVCOREF_MODEL_IO_H_

#include <cstdint>
#include <memory>
#include <string>

#include "evcoref/model.h"

namespace evcoref {

struct ModelMetadata {
  uint64_t seed = 0;
  std::string config_hash;
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON: metadata (format, mode, dims, schema and its hash, vocabulary,
// seed, config hash) followed by every parameter as a flat array in
// declaration order.
std::string SerializeModel(const Model &model, const ModelMetadata &meta);
std::unique_ptr<Model> ParseModel(const std::string &text, ModelMetadata *meta);

void SaveModel(const Model &model, const ModelMetadata &meta,
               const std::string &path);
std::unique_ptr<Model> LoadModel(const std::string &path, ModelMetadata *meta);

}  // namespace evcoref

#endif  // EVCOREF_MODEL_IO_H_
