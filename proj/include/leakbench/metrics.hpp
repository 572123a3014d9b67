// Copyright 2026 The leakbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEAKBENCH_METRICS_HPP
#define LEAKBENCH_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "leakbench/common.hpp"

namespace leakbench {

struct BinaryScores {
  std::vector<double> scores;
  std::vector<int> labels;  // 0 or 1

  void validate() const {
    if (scores.size() != labels.size()) throw ValidationError("scores/labels length mismatch");
    for (int l : labels) {
      if (l != 0 && l != 1) throw ValidationError("labels must be 0/1");
    }
  }
  std::size_t positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  }
};

// Mann-Whitney statistic with half credit for ties:
// P(score+ > score-) + 0.5 * P(score+ = score-).
inline double roc_auc(const BinaryScores& data) {
  data.validate();
  const std::size_t pos = data.positives();
  const std::size_t neg = data.labels.size() - pos;
  if (pos == 0 || neg == 0) throw ValidationError("roc_auc needs both classes");

  std::vector<std::size_t> order(data.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data.scores[a] < data.scores[b]; });

  // midranks over tie groups
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && data.scores[order[j]] == data.scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (data.labels[order[k]] == 1) pos_rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double n = static_cast<double>(neg);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

// Area under the precision-recall step curve, descending-score sweep with
// tied scores processed as one group.
inline double pr_auc(const BinaryScores& data) {
  data.validate();
  const std::size_t pos = data.positives();
  if (pos == 0) throw ValidationError("pr_auc needs at least one positive");

  std::vector<std::size_t> order(data.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data.scores[a] > data.scores[b]; });

  double area = 0.0;
  double tp = 0.0, fp = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && data.scores[order[j]] == data.scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (data.labels[order[k]] == 1) tp += 1.0;
      else fp += 1.0;
    }
    const double recall = tp / static_cast<double>(pos);
    const double precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

struct ConfusionSummary {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Standard confusion arithmetic; divisions by zero resolve to 0.
inline ConfusionSummary prf1(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw ValidationError("predictions/labels mismatch");
  ConfusionSummary c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++c.tp;
    else if (predictions[i] == 1 && labels[i] == 0) ++c.fp;
    else if (predictions[i] == 0 && labels[i] == 0) ++c.tn;
    else ++c.fn;
  }
  const double total = static_cast<double>(predictions.size());
  c.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
  c.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  c.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  c.f1 = (c.precision + c.recall) > 0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
                                      : 0.0;
  return c;
}

// Sentence-level BLEU on a 0-100 scale: clipped word n-gram precisions up to
// max_n, add-one smoothing when an order >= 2 has zero matches, orders with no
// candidate n-grams skipped, with the usual brevity penalty. Zero unigram
// overlap scores 0.
inline double bleu(const std::string& candidate, const std::string& reference, int max_n = 4) {
  auto ref_words = split_words(reference);
  if (ref_words.empty()) throw ValidationError("bleu: empty reference");
  auto cand_words = split_words(candidate);
  if (cand_words.empty()) return 0.0;

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    if (cand_words.size() < static_cast<std::size_t>(n)) break;
    std::map<std::vector<std::string>, std::size_t> cand_counts, ref_counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= cand_words.size(); ++i) {
      ++cand_counts[{cand_words.begin() + static_cast<std::ptrdiff_t>(i),
                     cand_words.begin() + static_cast<std::ptrdiff_t>(i) + n}];
    }
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= ref_words.size(); ++i) {
      ++ref_counts[{ref_words.begin() + static_cast<std::ptrdiff_t>(i),
                    ref_words.begin() + static_cast<std::ptrdiff_t>(i) + n}];
    }
    std::size_t match = 0, total = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) match += std::min(count, it->second);
    }
    double p;
    if (match == 0) {
      if (n == 1) return 0.0;
      p = 1.0 / (static_cast<double>(total) + 1.0);
    } else {
      p = static_cast<double>(match) / static_cast<double>(total);
    }
    log_sum += std::log(p);
    ++orders;
  }
  const double geo = std::exp(log_sum / static_cast<double>(orders));
  const double c = static_cast<double>(cand_words.size());
  const double r = static_cast<double>(ref_words.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * geo;
}

}  // namespace leakbench

#endif  // LEAKBENCH_METRICS_HPP
