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

#ifndef EVCOREF_METRICS_H_
#define EVCOREF_METRICS_H_

#include <string>
#include <vector>

#include "evcoref/inference.h"

namespace evcoref {

struct MetricTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // f1 = 2PR / (P + R), or 0 when P + R = 0.
  static MetricTriple FromPR(double precision, double recall);
};

struct MetricReport {
  MetricTriple muc;
  MetricTriple b3;
  MetricTriple ceaf_e;
  MetricTriple blanc;
  double conll = 0.0;  // mean F1 of MUC, B3, CEAF_e
  double avg = 0.0;    // mean F1 of MUC, B3, CEAF_e, BLANC
  // Set when there were fewer than two mentions, so BLANC is 0 by
  // convention.
  bool blanc_undefined = false;
};

// Sufficient statistics of all metrics. Corpus scores add the counts of
// every document (micro-average).
struct CorefCounts {
  double muc_recall_num = 0, muc_recall_den = 0;
  double muc_precision_num = 0, muc_precision_den = 0;
  double b3_recall_num = 0, b3_precision_num = 0, b3_mentions = 0;
  double ceaf_total = 0, ceaf_key_clusters = 0, ceaf_response_clusters = 0;
  double key_links = 0, response_links = 0, common_links = 0;
  double key_nonlinks = 0, response_nonlinks = 0, common_nonlinks = 0;

  CorefCounts &operator+=(const CorefCounts &other);
};

// Mentions present in only one of the clusterings are added to the other
// as singletons before counting.
CorefCounts CountCoref(const Clustering &key, const Clustering &response);

MetricTriple MucFromCounts(const CorefCounts &c);
MetricTriple BCubedFromCounts(const CorefCounts &c);
MetricTriple CeafEFromCounts(const CorefCounts &c);
// Second member is true when no mention pairs exist.
std::pair<MetricTriple, bool> BlancFromCounts(const CorefCounts &c);
MetricReport ReportFromCounts(const CorefCounts &c);

MetricTriple Muc(const Clustering &key, const Clustering &response);
MetricTriple BCubed(const Clustering &key, const Clustering &response);
MetricTriple CeafE(const Clustering &key, const Clustering &response);
MetricTriple Blanc(const Clustering &key, const Clustering &response);
MetricReport Score(const Clustering &key, const Clustering &response);

// (conll, avg) from the four F1 values.
std::pair<double, double> Summarize(const MetricTriple &muc,
                                    const MetricTriple &b3,
                                    const MetricTriple &ceaf_e,
                                    const MetricTriple &blanc);

// phi4(K, R) = 2 |K n R| / (|K| + |R|).
double Phi4(const std::vector<int> &key, const std::vector<int> &response);

struct Assignment {
  double value = 0.0;
  // Column assigned to each row; -1 for rows matched to padding.
  std::vector<int> column_of_row;
};

// Maximum-weight one-to-one assignment on a rectangular similarity matrix
// (Kuhn-Munkres on the zero-padded square matrix). `value` sums the chosen
// entries in row order.
Assignment Hungarian(const std::vector<std::vector<double>> &similarity);

// Aligned plain-text table of a report.
std::string FormatReport(const MetricReport &report);

}  // namespace evcoref

#endif  // EVCOREF_METRICS_H_
