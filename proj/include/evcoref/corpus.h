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

#ifndef EVCOREF_CORPUS_H_
#define EVCOREF_CORPUS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evcoref {

// Ordered inventory of categorical symbolic features. Values of feature u
// are the integers 1..cardinality(u).
class FeatureSchema {
 public:
  struct Feature {
    std::string name;
    int cardinality = 2;
  };

  FeatureSchema() = default;
  // Throws std::invalid_argument on duplicate names or cardinality < 2.
  explicit FeatureSchema(std::vector<Feature> features);

  // Type(8), Polarity(2), Modality(2), Genericity(2), Tense(4).
  static FeatureSchema AceDefault();

  int size() const { return static_cast<int>(features_.size()); }
  const Feature &operator[](int u) const { return features_[u]; }
  const std::vector<Feature> &features() const { return features_; }
  // -1 when absent.
  int IndexOf(const std::string &name) const;

  // FNV-1a over names and cardinalities, as 16 hex digits.
  std::string Hash() const;

  bool operator==(const FeatureSchema &other) const;

 private:
  std::vector<Feature> features_;
};

struct Mention {
  int start = 0;  // inclusive
  int end = 0;    // inclusive
  std::vector<int> features;  // 1-based, one per schema feature
  std::optional<int> gold_cluster;
  // Uncorrupted values, present on generated corpora.
  std::optional<std::vector<int>> true_features;

  bool operator==(const Mention &) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<Mention> mentions;

  bool operator==(const Document &) const = default;
};

// Empty string when valid; otherwise a diagnostic naming the first violated
// constraint and the offending mention index.
std::string ValidateDocument(const Document &doc, const FeatureSchema &schema);

// Stable sort by (start, end).
void SortMentions(Document &doc);

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON-Lines, one document per line. Throws CorpusError naming the line
// number for malformed input, unknown feature names or invalid documents.
std::vector<Document> LoadCorpus(const std::string &path,
                                 const FeatureSchema &schema);
void SaveCorpus(const std::vector<Document> &docs, const FeatureSchema &schema,
                const std::string &path);

// Single-line forms used by the file functions.
Document ParseDocument(const std::string &line, const FeatureSchema &schema);
std::string SerializeDocument(const Document &doc, const FeatureSchema &schema);

// Schema file: JSON object name -> cardinality, key order significant.
FeatureSchema LoadSchema(const std::string &path);
void SaveSchema(const FeatureSchema &schema, const std::string &path);
FeatureSchema ParseSchema(const std::string &json_text);
std::string SerializeSchema(const FeatureSchema &schema);

// 64-bit FNV-1a, used for schema and config hashes.
uint64_t Fnv1a(const std::string &data);
std::string HexDigest(uint64_t value);

}  // namespace evcoref

#endif  // EVCOREF_CORPUS_H_
