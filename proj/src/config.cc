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

#include "evcoref/config.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evcoref {

using ordered_json = nlohmann::ordered_json;

namespace {

double AceValueOr(const std::vector<double> &ace, const std::string &name,
                  double fallback) {
  const int u = FeatureSchema::AceDefault().IndexOf(name);
  return u >= 0 ? ace[u] : fallback;
}

ordered_json PerFeature(const FeatureSchema &schema, const std::vector<double> &values) {
  ordered_json obj = ordered_json::object();
  for (int u = 0; u < schema.size(); ++u) obj[schema[u].name] = values[u];
  return obj;
}

std::vector<double> PerFeatureValues(const FeatureSchema &schema,
                                     const ordered_json &obj, const char *field,
                                     double fallback) {
  if (!obj.is_object()) throw ConfigError(std::string(field) + " must be an object");
  std::vector<double> values(schema.size(), fallback);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const int u = schema.IndexOf(it.key());
    if (u < 0) {
      throw ConfigError(std::string(field) + ": unknown feature name " + it.key());
    }
    values[u] = it.value().get<double>();
  }
  return values;
}

ordered_json Range(const IntRange &r) { return ordered_json::array({r.min, r.max}); }

IntRange ParseRange(const ordered_json &j, const char *field) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(std::string(field) + " must be [min, max]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

RunConfig Defaults(const FeatureSchema &schema) {
  RunConfig c;
  c.schema = schema;
  const char *env = std::getenv("EVCOREF_OUT_DIR");
  if (env != nullptr && *env != '\0') c.out_dir = env;
  c.train_path = "train.jsonl";
  c.dev_path = "dev.jsonl";
  c.test_path = "test.jsonl";
  c.model_path = "model.json";
  c.gen.train_accuracy.clear();
  c.gen.test_accuracy.clear();
  c.noise.epsilon.clear();
  const NoiseConfig ace_noise = NoiseConfig::AceDefault();
  for (const auto &f : schema.features()) {
    c.gen.train_accuracy.push_back(AceValueOr(AceTrainAccuracies(), f.name, 1.0));
    c.gen.test_accuracy.push_back(AceValueOr(AceTestAccuracies(), f.name, 1.0));
    c.noise.epsilon.push_back(AceValueOr(ace_noise.epsilon, f.name, 0.0));
  }
  for (const char *v : {"baseline", "simple", "simple+noise", "cdgm", "cdgm+noise"}) {
    c.experiment.variants.push_back(ParseVariant(v));
  }
  return c;
}

ordered_json ToJson(const RunConfig &c, bool with_locations) {
  ordered_json j;
  j["seed"] = c.seed;
  if (with_locations) {
    j["out_dir"] = c.out_dir;
    j["schema_path"] = c.schema_path;
    j["paths"] = {{"train", c.train_path},
                  {"dev", c.dev_path},
                  {"test", c.test_path},
                  {"model", c.model_path}};
  }
  j["schema"] = ordered_json::parse(SerializeSchema(c.schema));
  j["mode"] = PairModeName(c.mode);
  j["dims"] = {{"token_dim", c.dims.token_dim},
               {"feature_dim", c.dims.feature_dim},
               {"pair_dim", c.dims.pair_dim},
               {"window", c.dims.window}};
  const GenConfig &g = c.gen;
  j["gen"] = {{"documents",
               {{"train", c.sizes.train}, {"dev", c.sizes.dev}, {"test", c.sizes.test}}},
              {"tokens_per_doc", Range(g.tokens_per_doc)},
              {"mentions_per_doc", Range(g.mentions_per_doc)},
              {"clusters_per_doc", Range(g.clusters_per_doc)},
              {"vocab_size", g.vocab_size},
              {"trigger_vocab", g.trigger_vocab},
              {"trigger_ambiguity", g.trigger_ambiguity},
              {"shared_trigger_events", g.shared_trigger_events},
              {"cue_rate", g.cue_rate},
              {"multi_token_rate", g.multi_token_rate},
              {"trigger_determined_features", g.trigger_determined_features},
              {"train_accuracy", PerFeature(c.schema, g.train_accuracy)},
              {"test_accuracy", PerFeature(c.schema, g.test_accuracy)}};
  j["train"] = {{"lower_lr", c.train.lower_lr},
                {"upper_lr", c.train.upper_lr},
                {"batch_size", c.train.batch_size},
                {"epochs", c.train.epochs},
                {"noise", c.train.noise}};
  j["noise"] = PerFeature(c.schema, c.noise.epsilon);
  ordered_json variants = ordered_json::array();
  for (const Variant &v : c.experiment.variants) variants.push_back(v.name);
  j["experiment"] = {{"variants", variants},
                     {"repetitions", c.experiment.repetitions}};
  j["predict"] = {{"drop_singletons", c.drop_singletons}};
  return j;
}

void SetDotted(ordered_json &root, const std::string &assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must be key=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  ordered_json value;
  try {
    value = ordered_json::parse(text);
  } catch (const ordered_json::parse_error &) {
    value = text;
  }
  ordered_json *node = &root;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    ordered_json &next = (*node)[path[i]];
    if (!next.is_object()) next = ordered_json::object();
    node = &next;
  }
  (*node)[path.back()] = std::move(value);
}

std::string Resolve(const std::string &dir, const std::string &path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

RunConfig FromJson(const ordered_json &j, const FeatureSchema &schema) {
  RunConfig c = Defaults(schema);
  c.seed = j.at("seed").get<uint64_t>();
  c.out_dir = j.at("out_dir").get<std::string>();
  c.schema_path = j.at("schema_path").get<std::string>();
  const auto &paths = j.at("paths");
  c.train_path = Resolve(c.out_dir, paths.at("train").get<std::string>());
  c.dev_path = Resolve(c.out_dir, paths.at("dev").get<std::string>());
  c.test_path = Resolve(c.out_dir, paths.at("test").get<std::string>());
  c.model_path = Resolve(c.out_dir, paths.at("model").get<std::string>());
  c.mode = ParsePairMode(j.at("mode").get<std::string>());
  const auto &d = j.at("dims");
  c.dims.token_dim = d.at("token_dim");
  c.dims.feature_dim = d.at("feature_dim");
  c.dims.pair_dim = d.at("pair_dim");
  c.dims.window = d.at("window");
  if (c.dims.token_dim <= 0 || c.dims.feature_dim <= 0 || c.dims.pair_dim <= 0 ||
      c.dims.window < 0) {
    throw ConfigError("dims must be positive (window >= 0)");
  }

  const auto &g = j.at("gen");
  const auto &docs = g.at("documents");
  c.sizes.train = docs.at("train");
  c.sizes.dev = docs.at("dev");
  c.sizes.test = docs.at("test");
  c.gen.tokens_per_doc = ParseRange(g.at("tokens_per_doc"), "gen.tokens_per_doc");
  c.gen.mentions_per_doc = ParseRange(g.at("mentions_per_doc"), "gen.mentions_per_doc");
  c.gen.clusters_per_doc = ParseRange(g.at("clusters_per_doc"), "gen.clusters_per_doc");
  c.gen.vocab_size = g.at("vocab_size");
  c.gen.trigger_vocab = g.at("trigger_vocab");
  c.gen.trigger_ambiguity = g.at("trigger_ambiguity");
  c.gen.shared_trigger_events = g.at("shared_trigger_events");
  c.gen.cue_rate = g.at("cue_rate");
  c.gen.multi_token_rate = g.at("multi_token_rate");
  c.gen.trigger_determined_features =
      g.at("trigger_determined_features").get<std::vector<std::string>>();
  c.gen.train_accuracy =
      PerFeatureValues(schema, g.at("train_accuracy"), "gen.train_accuracy", 1.0);
  c.gen.test_accuracy =
      PerFeatureValues(schema, g.at("test_accuracy"), "gen.test_accuracy", 1.0);
  c.gen.seed = c.seed;

  const auto &t = j.at("train");
  c.train.lower_lr = t.at("lower_lr");
  c.train.upper_lr = t.at("upper_lr");
  c.train.batch_size = t.at("batch_size");
  c.train.epochs = t.at("epochs");
  c.train.noise = t.at("noise");
  c.train.seed = c.seed;
  c.noise.epsilon = PerFeatureValues(schema, j.at("noise"), "noise", 0.0);

  const auto &e = j.at("experiment");
  c.experiment.variants.clear();
  for (const auto &v : e.at("variants")) {
    c.experiment.variants.push_back(ParseVariant(v.get<std::string>()));
  }
  c.experiment.repetitions = e.at("repetitions");
  c.experiment.seed = c.seed;
  if (c.experiment.variants.empty()) throw ConfigError("experiment needs >= 1 variant");
  if (c.experiment.repetitions < 1) throw ConfigError("experiment.repetitions must be >= 1");
  c.drop_singletons = j.at("predict").at("drop_singletons");
  return c;
}

}  // namespace

Variant ParseVariant(const std::string &name) {
  Variant v;
  v.name = name;
  std::string base = name;
  const std::string suffix = "+noise";
  if (base.size() > suffix.size() && base.ends_with(suffix)) {
    v.noise = true;
    base.resize(base.size() - suffix.size());
  }
  try {
    v.mode = ParsePairMode(base);
  } catch (const std::invalid_argument &) {
    throw ConfigError("unknown variant: " + name);
  }
  if (v.noise && v.mode == PairMode::kBaseline) {
    throw ConfigError("baseline takes no noise: " + name);
  }
  return v;
}

std::string RunConfig::Hash() const {
  return HexDigest(Fnv1a(ToJson(*this, /*with_locations=*/false).dump()));
}

std::string RunConfigToJson(const RunConfig &config) {
  return ToJson(config, /*with_locations=*/true).dump(2);
}

RunConfig LoadRunConfig(const std::string &config_path,
                        const std::vector<std::string> &overrides,
                        std::optional<uint64_t> seed_override) {
  try {
    ordered_json user = ordered_json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file: " + config_path);
      try {
        user = ordered_json::parse(in);
      } catch (const ordered_json::parse_error &e) {
        throw ConfigError("malformed config " + config_path + ": " + e.what());
      }
      if (!user.is_object()) throw ConfigError("config must be a JSON object");
    }
    for (const std::string &o : overrides) SetDotted(user, o);
    if (seed_override) user["seed"] = *seed_override;

    FeatureSchema schema = FeatureSchema::AceDefault();
    if (user.contains("schema_path") && !user["schema_path"].get<std::string>().empty()) {
      schema = LoadSchema(user["schema_path"].get<std::string>());
      user.erase("schema");
    } else if (user.contains("schema")) {
      schema = ParseSchema(user["schema"].dump());
    }
    RunConfig defaults = Defaults(schema);
    ordered_json merged = ToJson(defaults, /*with_locations=*/true);
    // Per-feature maps are replaced, not merged, so a custom schema does not
    // inherit default feature names.
    merged.merge_patch(user);
    for (const char *key : {"noise"}) {
      if (user.contains(key)) merged[key] = user[key];
    }
    RunConfig config = FromJson(merged, schema);
    return config;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const CorpusError &e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

}  // namespace evcoref
