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

#include "evcoref/metrics.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace evcoref {
namespace {

double Ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Adds mentions missing from `into` as singletons.
Clustering AlignUniverse(const Clustering &from, Clustering into) {
  std::set<int> present;
  for (const auto &c : into) present.insert(c.begin(), c.end());
  for (const auto &c : from) {
    for (int m : c) {
      if (present.insert(m).second) into.push_back({m});
    }
  }
  return into;
}

std::map<int, int> ClusterIndex(const Clustering &clusters) {
  std::map<int, int> index;
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (int m : clusters[c]) index[m] = static_cast<int>(c);
  }
  return index;
}

// sum over clusters of (|C| - number of parts of C under `other`).
void MucCounts(const Clustering &clusters, const std::map<int, int> &other,
               double *num, double *den) {
  for (const auto &c : clusters) {
    std::set<int> parts;
    for (int m : c) parts.insert(other.at(m));
    *num += static_cast<double>(c.size() - parts.size());
    *den += static_cast<double>(c.size() - 1);
  }
}

}  // namespace

MetricTriple MetricTriple::FromPR(double precision, double recall) {
  MetricTriple t;
  t.precision = precision;
  t.recall = recall;
  t.f1 = precision + recall > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
  return t;
}

CorefCounts &CorefCounts::operator+=(const CorefCounts &o) {
  muc_recall_num += o.muc_recall_num;
  muc_recall_den += o.muc_recall_den;
  muc_precision_num += o.muc_precision_num;
  muc_precision_den += o.muc_precision_den;
  b3_recall_num += o.b3_recall_num;
  b3_precision_num += o.b3_precision_num;
  b3_mentions += o.b3_mentions;
  ceaf_total += o.ceaf_total;
  ceaf_key_clusters += o.ceaf_key_clusters;
  ceaf_response_clusters += o.ceaf_response_clusters;
  key_links += o.key_links;
  response_links += o.response_links;
  common_links += o.common_links;
  key_nonlinks += o.key_nonlinks;
  response_nonlinks += o.response_nonlinks;
  common_nonlinks += o.common_nonlinks;
  return *this;
}

double Phi4(const std::vector<int> &key, const std::vector<int> &response) {
  if (key.empty() && response.empty()) return 0.0;
  std::set<int> k(key.begin(), key.end());
  double common = 0.0;
  for (int m : response) common += k.count(m);
  return 2.0 * common / static_cast<double>(key.size() + response.size());
}

Assignment Hungarian(const std::vector<std::vector<double>> &similarity) {
  const int rows = static_cast<int>(similarity.size());
  int cols = 0;
  for (const auto &r : similarity) cols = std::max(cols, static_cast<int>(r.size()));
  const int n = std::max(rows, cols);
  Assignment out;
  out.column_of_row.assign(rows, -1);
  if (n == 0) return out;

  // Minimum-cost form with cost = -similarity, 1-based with potentials.
  auto cost = [&](int i, int j) -> double {
    if (i > rows) return 0.0;
    const auto &r = similarity[i - 1];
    return j <= static_cast<int>(r.size()) ? -r[j - 1] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) {
    const int i = p[j];
    if (i >= 1 && i <= rows && j <= static_cast<int>(similarity[i - 1].size())) {
      out.column_of_row[i - 1] = j - 1;
    }
  }
  for (int i = 0; i < rows; ++i) {
    if (out.column_of_row[i] >= 0) out.value += similarity[i][out.column_of_row[i]];
  }
  return out;
}

CorefCounts CountCoref(const Clustering &key_in, const Clustering &response_in) {
  const Clustering key = AlignUniverse(response_in, key_in);
  const Clustering response = AlignUniverse(key_in, response_in);
  const std::map<int, int> key_of = ClusterIndex(key);
  const std::map<int, int> response_of = ClusterIndex(response);

  CorefCounts c;
  MucCounts(key, response_of, &c.muc_recall_num, &c.muc_recall_den);
  MucCounts(response, key_of, &c.muc_precision_num, &c.muc_precision_den);

  for (const auto &[m, kc] : key_of) {
    const auto &kset = key[kc];
    const auto &rset = response[response_of.at(m)];
    double common = 0.0;
    for (int x : rset) common += key_of.at(x) == kc;
    c.b3_recall_num += common / static_cast<double>(kset.size());
    c.b3_precision_num += common / static_cast<double>(rset.size());
    c.b3_mentions += 1.0;
  }

  std::vector<std::vector<double>> sim(key.size(),
                                       std::vector<double>(response.size()));
  for (size_t i = 0; i < key.size(); ++i) {
    for (size_t j = 0; j < response.size(); ++j) sim[i][j] = Phi4(key[i], response[j]);
  }
  c.ceaf_total = Hungarian(sim).value;
  c.ceaf_key_clusters = static_cast<double>(key.size());
  c.ceaf_response_clusters = static_cast<double>(response.size());

  std::vector<int> mentions;
  for (const auto &[m, kc] : key_of) mentions.push_back(m);
  for (size_t a = 0; a < mentions.size(); ++a) {
    for (size_t b = a + 1; b < mentions.size(); ++b) {
      const bool in_key = key_of.at(mentions[a]) == key_of.at(mentions[b]);
      const bool in_response =
          response_of.at(mentions[a]) == response_of.at(mentions[b]);
      if (in_key) c.key_links++; else c.key_nonlinks++;
      if (in_response) c.response_links++; else c.response_nonlinks++;
      if (in_key && in_response) c.common_links++;
      if (!in_key && !in_response) c.common_nonlinks++;
    }
  }
  return c;
}

MetricTriple MucFromCounts(const CorefCounts &c) {
  return MetricTriple::FromPR(Ratio(c.muc_precision_num, c.muc_precision_den),
                              Ratio(c.muc_recall_num, c.muc_recall_den));
}

MetricTriple BCubedFromCounts(const CorefCounts &c) {
  return MetricTriple::FromPR(Ratio(c.b3_precision_num, c.b3_mentions),
                              Ratio(c.b3_recall_num, c.b3_mentions));
}

MetricTriple CeafEFromCounts(const CorefCounts &c) {
  return MetricTriple::FromPR(Ratio(c.ceaf_total, c.ceaf_response_clusters),
                              Ratio(c.ceaf_total, c.ceaf_key_clusters));
}

std::pair<MetricTriple, bool> BlancFromCounts(const CorefCounts &c) {
  const double pairs = c.key_links + c.key_nonlinks;
  if (pairs == 0.0) return {MetricTriple{}, true};
  const MetricTriple links = MetricTriple::FromPR(
      Ratio(c.common_links, c.response_links), Ratio(c.common_links, c.key_links));
  const MetricTriple nonlinks =
      MetricTriple::FromPR(Ratio(c.common_nonlinks, c.response_nonlinks),
                           Ratio(c.common_nonlinks, c.key_nonlinks));
  if (c.key_links == 0.0 && c.response_links == 0.0) return {nonlinks, false};
  if (c.key_nonlinks == 0.0 && c.response_nonlinks == 0.0) return {links, false};
  MetricTriple t;
  t.precision = (links.precision + nonlinks.precision) / 2.0;
  t.recall = (links.recall + nonlinks.recall) / 2.0;
  t.f1 = (links.f1 + nonlinks.f1) / 2.0;
  return {t, false};
}

std::pair<double, double> Summarize(const MetricTriple &muc,
                                    const MetricTriple &b3,
                                    const MetricTriple &ceaf_e,
                                    const MetricTriple &blanc) {
  const double three = muc.f1 + b3.f1 + ceaf_e.f1;
  return {three / 3.0, (three + blanc.f1) / 4.0};
}

MetricReport ReportFromCounts(const CorefCounts &c) {
  MetricReport r;
  r.muc = MucFromCounts(c);
  r.b3 = BCubedFromCounts(c);
  r.ceaf_e = CeafEFromCounts(c);
  std::tie(r.blanc, r.blanc_undefined) = BlancFromCounts(c);
  std::tie(r.conll, r.avg) = Summarize(r.muc, r.b3, r.ceaf_e, r.blanc);
  return r;
}

MetricTriple Muc(const Clustering &key, const Clustering &response) {
  return MucFromCounts(CountCoref(key, response));
}

MetricTriple BCubed(const Clustering &key, const Clustering &response) {
  return BCubedFromCounts(CountCoref(key, response));
}

MetricTriple CeafE(const Clustering &key, const Clustering &response) {
  return CeafEFromCounts(CountCoref(key, response));
}

MetricTriple Blanc(const Clustering &key, const Clustering &response) {
  return BlancFromCounts(CountCoref(key, response)).first;
}

MetricReport Score(const Clustering &key, const Clustering &response) {
  return ReportFromCounts(CountCoref(key, response));
}

std::string FormatReport(const MetricReport &report) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-8s %10s %10s %10s\n", "metric",
                "precision", "recall", "f1");
  out << line;
  const std::pair<const char *, const MetricTriple *> rows[] = {
      {"MUC", &report.muc},
      {"B3", &report.b3},
      {"CEAF_e", &report.ceaf_e},
      {"BLANC", &report.blanc}};
  for (const auto &[name, t] : rows) {
    std::snprintf(line, sizeof(line), "%-8s %10.4f %10.4f %10.4f\n", name,
                  100.0 * t->precision, 100.0 * t->recall, 100.0 * t->f1);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-8s %32.4f\n", "CoNLL", 100.0 * report.conll);
  out << line;
  std::snprintf(line, sizeof(line), "%-8s %32.4f\n", "AVG", 100.0 * report.avg);
  out << line;
  if (report.blanc_undefined) out << "note: fewer than two mentions, BLANC set to 0\n";
  return out.str();
}

}  // namespace evcoref
