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

#include "evcoref/model_io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evcoref {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr const char *kFormat = "evcoref-model-v1";
}  // namespace

std::string SerializeModel(const Model &model, const ModelMetadata &meta) {
  ordered_json j;
  j["format"] = kFormat;
  j["mode"] = PairModeName(model.mode());
  j["dims"] = {{"token_dim", model.dims().token_dim},
               {"feature_dim", model.dims().feature_dim},
               {"pair_dim", model.dims().pair_dim},
               {"window", model.dims().window}};
  j["schema"] = ordered_json::parse(SerializeSchema(model.schema()));
  j["schema_hash"] = model.schema().Hash();
  j["seed"] = meta.seed;
  j["config_hash"] = meta.config_hash;
  j["vocab"] = model.vocab().tokens();
  ordered_json params = ordered_json::array();
  for (const Parameter &p : model.store().params()) {
    ordered_json pj;
    pj["name"] = p.name;
    pj["rows"] = p.rows;
    pj["cols"] = p.cols;
    pj["values"] = p.value;
    params.push_back(std::move(pj));
  }
  j["params"] = std::move(params);
  return j.dump(1) + "\n";
}

std::unique_ptr<Model> ParseModel(const std::string &text, ModelMetadata *meta) {
  try {
    const ordered_json j = ordered_json::parse(text);
    if (j.at("format") != kFormat) {
      throw ModelFormatError("unsupported model format");
    }
    FeatureSchema schema = ParseSchema(j.at("schema").dump());
    if (schema.Hash() != j.at("schema_hash").get<std::string>()) {
      throw ModelFormatError("schema hash does not match embedded schema");
    }
    ModelDims dims;
    const auto &dj = j.at("dims");
    dims.token_dim = dj.at("token_dim");
    dims.feature_dim = dj.at("feature_dim");
    dims.pair_dim = dj.at("pair_dim");
    dims.window = dj.at("window");
    std::vector<std::string> tokens = j.at("vocab").get<std::vector<std::string>>();
    if (tokens.empty() || tokens[0] != Vocabulary::kUnknownToken) {
      throw ModelFormatError("vocabulary must start with <unk>");
    }
    tokens.erase(tokens.begin());
    auto model = std::make_unique<Model>(std::move(schema),
                                         Vocabulary::FromTokens(tokens), dims,
                                         ParsePairMode(j.at("mode")));
    const auto &params = j.at("params");
    auto &store = model->store().params();
    if (params.size() != store.size()) {
      throw ModelFormatError("expected " + std::to_string(store.size()) +
                             " parameters, found " + std::to_string(params.size()));
    }
    for (size_t i = 0; i < store.size(); ++i) {
      const auto &pj = params[i];
      Parameter &p = store[i];
      if (pj.at("name") != p.name || pj.at("rows") != p.rows ||
          pj.at("cols") != p.cols) {
        throw ModelFormatError("parameter " + std::to_string(i) +
                               " does not match architecture (" + p.name + ")");
      }
      std::vector<double> values = pj.at("values").get<std::vector<double>>();
      if (values.size() != p.size()) {
        throw ModelFormatError("parameter " + p.name + " has wrong size");
      }
      p.value = std::move(values);
    }
    if (meta != nullptr) {
      meta->seed = j.at("seed").get<uint64_t>();
      meta->config_hash = j.at("config_hash").get<std::string>();
    }
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  } catch (const CorpusError &e) {
    throw ModelFormatError(std::string("malformed model schema: ") + e.what());
  }
}

void SaveModel(const Model &model, const ModelMetadata &meta,
               const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelFormatError("cannot write model file: " + path);
  out << SerializeModel(model, meta);
  if (!out) throw ModelFormatError("write failed: " + path);
}

std::unique_ptr<Model> LoadModel(const std::string &path, ModelMetadata *meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseModel(buf.str(), meta);
}

}  // namespace evcoref
