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

#include "evcoref/commands.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "evcoref/experiment.h"
#include "evcoref/inference.h"
#include "evcoref/metrics.h"
#include "evcoref/model_io.h"
#include "evcoref/synthetic.h"
#include "evcoref/training.h"
#include "json.hpp"

namespace evcoref {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

void EnsureDir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CommandError("cannot create output directory " + dir + ": " + ec.message());
}

void EnsureParent(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) EnsureDir(parent.string());
}

void WriteText(const std::string &path, const std::string &text) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CommandError("cannot write " + path);
  out << text;
  if (!out) throw CommandError("write failed: " + path);
}

std::string InDir(const RunConfig &config, const std::string &name) {
  return (fs::path(config.out_dir) / name).string();
}

std::vector<Document> LoadOrThrow(const std::string &path, const FeatureSchema &schema) {
  if (!fs::exists(path)) throw CommandError("corpus file not found: " + path);
  return LoadCorpus(path, schema);
}

ordered_json TripleJson(const MetricTriple &t) {
  return {{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}};
}

}  // namespace

std::string CmdGen(const RunConfig &config) {
  EnsureDir(config.out_dir);
  const Corpora corpora = GenerateCorpora(config, config.seed);
  for (const auto &[path, docs] :
       {std::pair{config.train_path, &corpora.train},
        std::pair{config.dev_path, &corpora.dev},
        std::pair{config.test_path, &corpora.test}}) {
    EnsureParent(path);
    SaveCorpus(*docs, config.schema, path);
  }
  SaveSchema(config.schema, InDir(config, "schema.json"));
  ordered_json manifest;
  manifest["command"] = "gen";
  manifest["seed"] = config.seed;
  manifest["config_hash"] = config.Hash();
  manifest["schema_hash"] = config.schema.Hash();
  manifest["documents"] = {{"train", corpora.train.size()},
                           {"dev", corpora.dev.size()},
                           {"test", corpora.test.size()}};
  manifest["files"] = {{"train", fs::path(config.train_path).filename().string()},
                       {"dev", fs::path(config.dev_path).filename().string()},
                       {"test", fs::path(config.test_path).filename().string()}};
  WriteText(InDir(config, "gen_manifest.json"), manifest.dump(2) + "\n");
  std::ostringstream out;
  out << "wrote " << corpora.train.size() << "/" << corpora.dev.size() << "/"
      << corpora.test.size() << " documents to " << config.out_dir << "\n";
  return out.str();
}

std::string CmdTrain(const RunConfig &config) {
  const std::vector<Document> train = LoadOrThrow(config.train_path, config.schema);
  if (train.empty()) throw CommandError("training corpus is empty: " + config.train_path);
  std::vector<Document> dev;
  const bool has_dev = !config.dev_path.empty() && fs::exists(config.dev_path);
  if (has_dev) dev = LoadCorpus(config.dev_path, config.schema);

  Model model(config.schema, Vocabulary::FromCorpus(train), config.dims, config.mode);
  model.InitializeRandom(config.seed);
  TrainConfig tc = config.train;
  tc.seed = config.seed;
  TrainHistory history;
  try {
    history = Train(model, train, has_dev && !dev.empty() ? &dev : nullptr, tc,
                    config.noise);
  } catch (const TrainingError &e) {
    throw CommandError(std::string("training diverged: ") + e.what());
  }
  const std::string hash = config.Hash();
  EnsureParent(config.model_path);
  SaveModel(model, ModelMetadata{config.seed, hash}, config.model_path);

  ordered_json h;
  h["config_hash"] = hash;
  h["mode"] = PairModeName(config.mode);
  h["noise"] = tc.noise;
  h["initial_loss"] = history.initial_loss;
  h["epoch_loss"] = history.epoch_loss;
  if (history.initial_dev_avg) {
    h["initial_dev_avg"] = *history.initial_dev_avg;
  } else {
    h["initial_dev_avg"] = nullptr;
  }
  h["dev_avg"] = history.dev_avg;
  h["best_epoch"] = history.best_epoch;
  WriteText(InDir(config, "history.json"), h.dump(2) + "\n");

  std::ostringstream out;
  out << "trained " << PairModeName(config.mode) << (tc.noise ? "+noise" : "")
      << " for " << tc.epochs << " epochs; best epoch " << history.best_epoch;
  if (!history.dev_avg.empty() || history.initial_dev_avg) {
    const double best = history.best_epoch == 0
                            ? *history.initial_dev_avg
                            : history.dev_avg[history.best_epoch - 1];
    char buf[64];
    std::snprintf(buf, sizeof(buf), " (dev AVG %.2f)", 100.0 * best);
    out << buf;
  }
  out << "\nmodel: " << config.model_path << "\n";
  return out.str();
}

std::string CmdPredict(const RunConfig &config, const PredictOptions &options) {
  if (!fs::exists(config.model_path)) {
    throw CommandError("model file not found: " + config.model_path);
  }
  const std::unique_ptr<Model> model = LoadModel(config.model_path, nullptr);
  if (model->schema().Hash() != config.schema.Hash()) {
    throw CommandError("schema mismatch: model " + model->schema().Hash() +
                       " vs config " + config.schema.Hash());
  }
  const std::string input = options.input.empty() ? config.test_path : options.input;
  const std::string output =
      options.output.empty() ? InDir(config, "predictions.jsonl") : options.output;
  const std::vector<Document> docs = LoadOrThrow(input, model->schema());

  std::vector<DocClustering> responses;
  std::vector<DocClustering> keys;
  bool has_gold = true;
  const std::vector<Clustering> predicted = PredictCorpus(*model, docs);
  for (size_t d = 0; d < docs.size(); ++d) {
    Clustering c = predicted[d];
    if (config.drop_singletons) c = WithoutSingletons(c);
    responses.push_back({docs[d].doc_id, std::move(c)});
    for (const Mention &m : docs[d].mentions) has_gold = has_gold && m.gold_cluster.has_value();
    if (has_gold) {
      Clustering key = GoldClustering(docs[d]);
      if (config.drop_singletons) key = WithoutSingletons(key);
      keys.push_back({docs[d].doc_id, std::move(key)});
    }
  }
  EnsureParent(output);
  SaveClusterings(responses, output);
  ordered_json manifest;
  manifest["command"] = "predict";
  manifest["config_hash"] = config.Hash();
  manifest["model"] = fs::path(config.model_path).filename().string();
  manifest["input"] = fs::path(input).filename().string();
  manifest["documents"] = docs.size();
  WriteText(output + ".manifest.json", manifest.dump(2) + "\n");
  std::ostringstream out;
  out << "wrote " << responses.size() << " clusterings to " << output << "\n";
  if (has_gold && !docs.empty()) {
    const std::string key_path = (fs::path(output).parent_path() / "key.jsonl").string();
    SaveClusterings(keys, key_path);
    out << "wrote gold clusterings to " << key_path << "\n";
  }
  return out.str();
}

std::string CmdScore(const std::string &key_path, const std::string &response_path,
                     const std::string &output_json, const std::string &config_hash) {
  const std::vector<DocClustering> keys = LoadClusterings(key_path);
  const std::vector<DocClustering> responses = LoadClusterings(response_path);
  std::map<std::string, const Clustering *> by_id;
  for (const DocClustering &r : responses) {
    if (!by_id.emplace(r.doc_id, &r.clusters).second) {
      throw CommandError("duplicate doc_id in response: " + r.doc_id);
    }
  }
  std::set<std::string> key_ids;
  CorefCounts total;
  for (const DocClustering &k : keys) {
    if (!key_ids.insert(k.doc_id).second) {
      throw CommandError("duplicate doc_id in key: " + k.doc_id);
    }
    auto it = by_id.find(k.doc_id);
    if (it == by_id.end()) throw CommandError("doc_id missing from response: " + k.doc_id);
    total += CountCoref(k.clusters, *it->second);
  }
  for (const DocClustering &r : responses) {
    if (!key_ids.count(r.doc_id)) throw CommandError("doc_id missing from key: " + r.doc_id);
  }
  const MetricReport report = ReportFromCounts(total);
  if (!output_json.empty()) {
    ordered_json j;
    j["key"] = fs::path(key_path).filename().string();
    j["response"] = fs::path(response_path).filename().string();
    j["config_hash"] = config_hash;
    std::string inputs;
    for (const DocClustering &k : keys) inputs += SerializeClustering(k) + "\n";
    inputs += "|";
    for (const DocClustering &r : responses) inputs += SerializeClustering(r) + "\n";
    j["inputs_hash"] = HexDigest(Fnv1a(inputs));
    j["documents"] = keys.size();
    j["muc"] = TripleJson(report.muc);
    j["b3"] = TripleJson(report.b3);
    j["ceaf_e"] = TripleJson(report.ceaf_e);
    j["blanc"] = TripleJson(report.blanc);
    j["conll"] = report.conll;
    j["avg"] = report.avg;
    j["blanc_undefined"] = report.blanc_undefined;
    WriteText(output_json, j.dump(2) + "\n");
  }
  return FormatReport(report);
}

Document GradcheckDocument(const FeatureSchema &schema, uint64_t seed) {
  std::mt19937_64 rng(MixSeed(seed, 31));
  Document doc;
  doc.doc_id = "gradcheck";
  for (int i = 0; i < 9; ++i) doc.tokens.push_back("g" + std::to_string(i));
  const int spans[3][2] = {{1, 1}, {3, 4}, {7, 7}};
  const int clusters[3] = {0, 0, 1};
  for (int i = 0; i < 3; ++i) {
    Mention m;
    m.start = spans[i][0];
    m.end = spans[i][1];
    for (int u = 0; u < schema.size(); ++u) {
      m.features.push_back(
          std::uniform_int_distribution<int>(1, schema[u].cardinality)(rng));
    }
    m.gold_cluster = clusters[i];
    doc.mentions.push_back(std::move(m));
  }
  return doc;
}

GradcheckOutcome CmdGradcheck(const RunConfig &config,
                              const GradcheckCommandOptions &options) {
  if (options.num_features < 0 || options.num_features > config.schema.size()) {
    throw CommandError("gradcheck: --features must be in [0, " +
                       std::to_string(config.schema.size()) + "]");
  }
  std::vector<FeatureSchema::Feature> features(
      config.schema.features().begin(),
      config.schema.features().begin() + options.num_features);
  const FeatureSchema schema(features);
  const Document doc = GradcheckDocument(schema, config.seed);
  ModelDims dims = kGradcheckDims;
  dims.window = config.dims.window;
  Model model(schema, Vocabulary::FromCorpus({doc}), dims, config.mode);
  model.InitializeWellScaled(config.seed);

  GradCheckOptions gc;
  gc.expected_blocks = Model::BlockNames();
  if (!options.corrupt_block.empty()) {
    const std::string block = options.corrupt_block;
    gc.corrupt_analytic = [block](ParameterStore &store) {
      for (Parameter &p : store.params()) {
        if (BlockOf(p.name) != block) continue;
        for (double &g : p.grad) g += 0.1 * (std::fabs(g) + 1.0);
      }
    };
  }
  GradcheckOutcome outcome;
  outcome.report = GradCheck(
      [&](Tape &tape) { return DocumentLoss(tape, model, doc); }, model.store(), gc);

  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-18s %8s %14s  %s\n", "block", "scalars",
                "max_rel_error", "status");
  out << line;
  for (const GradCheckBlock &b : outcome.report.blocks) {
    std::snprintf(line, sizeof(line), "%-18s %8zu %14.3e  %s\n", b.name.c_str(),
                  b.num_scalars, b.max_rel_error, b.passed ? "ok" : "FAIL");
    out << line;
  }
  for (const std::string &s : outcome.report.skipped) {
    std::snprintf(line, sizeof(line), "%-18s %8s %14s  %s\n", s.c_str(), "0", "-",
                  "skipped");
    out << line;
  }
  std::snprintf(line, sizeof(line), "worst %.3e (tolerance %.0e): %s\n",
                outcome.report.worst, gc.tolerance,
                outcome.report.passed ? "PASS" : "FAIL");
  out << line;
  outcome.text = out.str();
  return outcome;
}

std::string CmdExperiment(const RunConfig &config) {
  const ExperimentResult result = RunExperiment(config);
  WriteText(InDir(config, "experiment.json"), ExperimentToJson(result, config.Hash()));
  return FormatExperimentTable(result);
}

}  // namespace evcoref
