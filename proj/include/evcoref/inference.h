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

#ifndef EVCOREF_INFERENCE_H_
#define EVCOREF_INFERENCE_H_

#include <string>
#include <vector>

#include "evcoref/corpus.h"
#include "evcoref/pair_model.h"

namespace evcoref {

// Antecedent index per mention; kDummy means no antecedent.
inline constexpr int kDummy = -1;
using AntecedentAssignment = std::vector<int>;

// A partition of mention indices. Canonical form: members ascending,
// clusters ordered by their smallest member.
using Clustering = std::vector<std::vector<int>>;

// a_i = argmax_{j<i} s(i, j), with the dummy fixed at score 0. Ties go to
// the earliest antecedent, and a maximum of exactly 0 goes to the dummy.
AntecedentAssignment DecodeAntecedents(const PairScoreMatrix &scores);

// Transitive closure of the antecedent links; every mention appears once,
// singletons included.
Clustering ClustersFromLinks(const AntecedentAssignment &assignment);

// Gold partition of a document. Throws std::invalid_argument if a mention
// has no gold cluster.
Clustering GoldClustering(const Document &doc);

Clustering Canonicalize(Clustering clusters);

// Drops single-member clusters.
Clustering WithoutSingletons(const Clustering &clusters);

// One line of a clustering file: {"doc_id": ..., "clusters": [[0,1],[2]]}.
struct DocClustering {
  std::string doc_id;
  Clustering clusters;
};

std::string SerializeClustering(const DocClustering &c);
// Throws CorpusError naming the line on malformed input or a mention that
// appears in two clusters.
std::vector<DocClustering> LoadClusterings(const std::string &path);
void SaveClusterings(const std::vector<DocClustering> &clusterings,
                     const std::string &path);

class DisjointSet {
 public:
  explicit DisjointSet(int n);
  int Find(int x);
  void Union(int a, int b);

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

}  // namespace evcoref

#endif  // EVCOREF_INFERENCE_H_
