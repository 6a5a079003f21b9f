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

#include "evcoref/corpus.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace evcoref {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

uint64_t Fnv1a(const std::string &data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

FeatureSchema::FeatureSchema(std::vector<Feature> features)
    : features_(std::move(features)) {
  std::set<std::string> seen;
  for (const Feature &f : features_) {
    if (!seen.insert(f.name).second) {
      throw std::invalid_argument("duplicate feature name: " + f.name);
    }
    if (f.cardinality < 2) {
      throw std::invalid_argument("feature " + f.name +
                                  " has cardinality < 2");
    }
  }
}

FeatureSchema FeatureSchema::AceDefault() {
  return FeatureSchema({{"Type", 8},
                        {"Polarity", 2},
                        {"Modality", 2},
                        {"Genericity", 2},
                        {"Tense", 4}});
}

int FeatureSchema::IndexOf(const std::string &name) const {
  for (int u = 0; u < size(); ++u) {
    if (features_[u].name == name) return u;
  }
  return -1;
}

std::string FeatureSchema::Hash() const {
  return HexDigest(Fnv1a(SerializeSchema(*this)));
}

bool FeatureSchema::operator==(const FeatureSchema &other) const {
  if (features_.size() != other.features_.size()) return false;
  for (size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name != other.features_[i].name ||
        features_[i].cardinality != other.features_[i].cardinality) {
      return false;
    }
  }
  return true;
}

std::string ValidateDocument(const Document &doc, const FeatureSchema &schema) {
  const int n = static_cast<int>(doc.tokens.size());
  for (size_t i = 0; i < doc.mentions.size(); ++i) {
    const Mention &m = doc.mentions[i];
    const std::string at = " at mention " + std::to_string(i);
    if (m.start > m.end) return "span reversed" + at;
    if (m.start < 0 || m.end >= n) return "span out of bounds" + at;
    if (static_cast<int>(m.features.size()) != schema.size()) {
      return "feature count mismatch" + at;
    }
    for (int u = 0; u < schema.size(); ++u) {
      if (m.features[u] < 1 || m.features[u] > schema[u].cardinality) {
        return "feature " + schema[u].name + " out of range" + at;
      }
    }
    if (m.true_features) {
      if (static_cast<int>(m.true_features->size()) != schema.size()) {
        return "true feature count mismatch" + at;
      }
      for (int u = 0; u < schema.size(); ++u) {
        const int v = (*m.true_features)[u];
        if (v < 1 || v > schema[u].cardinality) {
          return "true feature " + schema[u].name + " out of range" + at;
        }
      }
    }
    if (i > 0) {
      const Mention &prev = doc.mentions[i - 1];
      if (m.start < prev.start ||
          (m.start == prev.start && m.end < prev.end)) {
        return "ordering violated" + at;
      }
    }
  }
  return "";
}

void SortMentions(Document &doc) {
  std::stable_sort(doc.mentions.begin(), doc.mentions.end(),
                   [](const Mention &a, const Mention &b) {
                     if (a.start != b.start) return a.start < b.start;
                     return a.end < b.end;
                   });
}

namespace {

std::vector<int> ParseFeatureObject(const json &obj,
                                    const FeatureSchema &schema,
                                    const char *field) {
  if (!obj.is_object()) {
    throw CorpusError(std::string(field) + " must be an object");
  }
  std::vector<int> values(schema.size(), 0);
  std::vector<bool> present(schema.size(), false);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const int u = schema.IndexOf(it.key());
    if (u < 0) throw CorpusError("unknown feature name: " + it.key());
    values[u] = it.value().get<int>();
    present[u] = true;
  }
  for (int u = 0; u < schema.size(); ++u) {
    if (!present[u]) {
      throw CorpusError("missing feature " + schema[u].name + " in " + field);
    }
  }
  return values;
}

ordered_json FeatureObject(const std::vector<int> &values,
                           const FeatureSchema &schema) {
  ordered_json obj = ordered_json::object();
  for (int u = 0; u < schema.size(); ++u) obj[schema[u].name] = values[u];
  return obj;
}

}  // namespace

Document ParseDocument(const std::string &line, const FeatureSchema &schema) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw CorpusError(std::string("malformed JSON: ") + e.what());
  }
  Document doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const json &mj : j.at("mentions")) {
      Mention m;
      m.start = mj.at("start").get<int>();
      m.end = mj.at("end").get<int>();
      m.features = ParseFeatureObject(mj.at("features"), schema, "features");
      if (mj.contains("gold_cluster") && !mj["gold_cluster"].is_null()) {
        m.gold_cluster = mj["gold_cluster"].get<int>();
      }
      if (mj.contains("true_features")) {
        m.true_features =
            ParseFeatureObject(mj["true_features"], schema, "true_features");
      }
      doc.mentions.push_back(std::move(m));
    }
  } catch (const json::exception &e) {
    throw CorpusError(std::string("malformed document: ") + e.what());
  }
  const std::string problem = ValidateDocument(doc, schema);
  if (!problem.empty()) {
    throw CorpusError("invalid document " + doc.doc_id + ": " + problem);
  }
  return doc;
}

std::string SerializeDocument(const Document &doc, const FeatureSchema &schema) {
  ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["tokens"] = doc.tokens;
  ordered_json mentions = ordered_json::array();
  for (const Mention &m : doc.mentions) {
    ordered_json mj;
    mj["start"] = m.start;
    mj["end"] = m.end;
    mj["features"] = FeatureObject(m.features, schema);
    if (m.gold_cluster) mj["gold_cluster"] = *m.gold_cluster;
    if (m.true_features) {
      mj["true_features"] = FeatureObject(*m.true_features, schema);
    }
    mentions.push_back(std::move(mj));
  }
  j["mentions"] = std::move(mentions);
  return j.dump();
}

std::vector<Document> LoadCorpus(const std::string &path,
                                 const FeatureSchema &schema) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file: " + path);
  std::vector<Document> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(ParseDocument(line, schema));
    } catch (const CorpusError &e) {
      throw CorpusError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void SaveCorpus(const std::vector<Document> &docs, const FeatureSchema &schema,
                const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write corpus file: " + path);
  for (const Document &doc : docs) out << SerializeDocument(doc, schema) << '\n';
  if (!out) throw CorpusError("write failed: " + path);
}

FeatureSchema ParseSchema(const std::string &json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error &e) {
    throw CorpusError(std::string("malformed schema: ") + e.what());
  }
  if (!j.is_object()) throw CorpusError("schema must be a JSON object");
  std::vector<FeatureSchema::Feature> features;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw CorpusError("schema cardinality for " + it.key() +
                        " must be an integer");
    }
    features.push_back({it.key(), it.value().get<int>()});
  }
  try {
    return FeatureSchema(std::move(features));
  } catch (const std::invalid_argument &e) {
    throw CorpusError(e.what());
  }
}

std::string SerializeSchema(const FeatureSchema &schema) {
  ordered_json j = ordered_json::object();
  for (const auto &f : schema.features()) j[f.name] = f.cardinality;
  return j.dump();
}

FeatureSchema LoadSchema(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open schema file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseSchema(buf.str());
}

void SaveSchema(const FeatureSchema &schema, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write schema file: " + path);
  out << SerializeSchema(schema) << '\n';
}

}  // namespace evcoref
