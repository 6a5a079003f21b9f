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

#include "evcoref/inference.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace evcoref {

DisjointSet::DisjointSet(int n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int DisjointSet::Find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void DisjointSet::Union(int a, int b) {
  a = Find(a);
  b = Find(b);
  if (a == b) return;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) rank_[a]++;
}

AntecedentAssignment DecodeAntecedents(const PairScoreMatrix &scores) {
  const int k = scores.num_mentions();
  AntecedentAssignment a(k, kDummy);
  for (int i = 1; i < k; ++i) {
    double best = 0.0;
    for (int j = 0; j < i; ++j) {
      if (scores.at(i, j) > best) {
        best = scores.at(i, j);
        a[i] = j;
      }
    }
  }
  return a;
}

Clustering ClustersFromLinks(const AntecedentAssignment &assignment) {
  const int k = static_cast<int>(assignment.size());
  DisjointSet sets(k);
  for (int i = 0; i < k; ++i) {
    const int j = assignment[i];
    if (j == kDummy) continue;
    if (j < 0 || j >= i) {
      throw std::invalid_argument("antecedent of mention " + std::to_string(i) +
                                  " must precede it");
    }
    sets.Union(i, j);
  }
  std::map<int, std::vector<int>> by_root;
  for (int i = 0; i < k; ++i) by_root[sets.Find(i)].push_back(i);
  Clustering out;
  for (auto &[root, members] : by_root) out.push_back(std::move(members));
  return Canonicalize(std::move(out));
}

Clustering GoldClustering(const Document &doc) {
  std::map<int, std::vector<int>> by_id;
  for (size_t i = 0; i < doc.mentions.size(); ++i) {
    const Mention &m = doc.mentions[i];
    if (!m.gold_cluster) {
      throw std::invalid_argument("document " + doc.doc_id + ": mention " +
                                  std::to_string(i) + " has no gold cluster");
    }
    by_id[*m.gold_cluster].push_back(static_cast<int>(i));
  }
  Clustering out;
  for (auto &[id, members] : by_id) out.push_back(std::move(members));
  return Canonicalize(std::move(out));
}

Clustering Canonicalize(Clustering clusters) {
  std::erase_if(clusters, [](const std::vector<int> &c) { return c.empty(); });
  for (auto &c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const std::vector<int> &a, const std::vector<int> &b) {
              return a.front() < b.front();
            });
  return clusters;
}

Clustering WithoutSingletons(const Clustering &clusters) {
  Clustering out;
  for (const auto &c : clusters) {
    if (c.size() > 1) out.push_back(c);
  }
  return out;
}

std::string SerializeClustering(const DocClustering &c) {
  nlohmann::ordered_json j;
  j["doc_id"] = c.doc_id;
  j["clusters"] = c.clusters;
  return j.dump();
}

std::vector<DocClustering> LoadClusterings(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open clustering file: " + path);
  std::vector<DocClustering> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    DocClustering c;
    try {
      const auto j = nlohmann::json::parse(line);
      c.doc_id = j.at("doc_id").get<std::string>();
      c.clusters = j.at("clusters").get<Clustering>();
    } catch (const nlohmann::json::exception &e) {
      throw CorpusError(where + "malformed clustering: " + e.what());
    }
    std::set<int> seen;
    for (const auto &cluster : c.clusters) {
      for (int m : cluster) {
        if (!seen.insert(m).second) {
          throw CorpusError(where + "mention " + std::to_string(m) +
                            " appears in more than one cluster");
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

void SaveClusterings(const std::vector<DocClustering> &clusterings,
                     const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write clustering file: " + path);
  for (const DocClustering &c : clusterings) out << SerializeClustering(c) << '\n';
  if (!out) throw CorpusError("write failed: " + path);
}

}  // namespace evcoref
