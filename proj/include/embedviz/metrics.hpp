/*
 * Copyright 2026 The embedviz Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EMBEDVIZ_METRICS_HPP_
#define EMBEDVIZ_METRICS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "embedviz/data.hpp"
#include "embedviz/error.hpp"

namespace embedviz {

// Binary confusion counts with +1 (failed) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricsReport {
  std::string classifier;
  int option = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double balanced_accuracy = 0.0;
  double auc = 0.0;
  ConfusionMatrix confusion;
};

namespace detail {

inline double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

inline void check_labels(std::span<const int> labels, const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kSafe && labels[i] != kFailed) {
      throw Error(ErrorKind::kBadLabel,
                  std::string(what) + " entry " + std::to_string(i + 1) + " is not -1 or +1", i + 1);
    }
  }
}

}  // namespace detail

inline ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::kLengthMismatch, "y_true and y_pred lengths differ");
  }
  detail::require(!y_true.empty(), ErrorKind::kInvalidArgument, "confusion of empty vectors");
  detail::check_labels(y_true, "y_true");
  detail::check_labels(y_pred, "y_pred");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual = y_true[i] == kFailed;
    const bool predicted = y_pred[i] == kFailed;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (!actual) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

// Zero denominators give 0.
inline double precision(const ConfusionMatrix& cm) {
  return detail::ratio_or_zero(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
}

inline double recall(const ConfusionMatrix& cm) {
  return detail::ratio_or_zero(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
}

inline double f1_score(const ConfusionMatrix& cm) {
  const double p = precision(cm), r = recall(cm);
  return detail::ratio_or_zero(2.0 * p * r, p + r);
}

// Mean of the per-class recalls; a class with no samples contributes 0.
inline double balanced_accuracy(const ConfusionMatrix& cm) {
  const double tpr = detail::ratio_or_zero(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
  const double tnr = detail::ratio_or_zero(static_cast<double>(cm.tn), static_cast<double>(cm.tn + cm.fp));
  return 0.5 * (tpr + tnr);
}

// Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie). Counted in
// half-units with integers so the result is exact.
inline double auc_roc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) {
    throw Error(ErrorKind::kLengthMismatch, "y_true and scores lengths differ");
  }
  detail::check_labels(y_true, "y_true");
  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t n_pos = 0, n_neg = 0, twice_u = 0;
  std::uint64_t neg_below = 0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    std::uint64_t pos_here = 0, neg_here = 0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      (y_true[order[end]] == kFailed ? pos_here : neg_here) += 1;
      ++end;
    }
    twice_u += 2 * pos_here * neg_below + pos_here * neg_here;
    neg_below += neg_here;
    n_pos += pos_here;
    n_neg += neg_here;
    start = end;
  }
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::kSingleClass, "AUC needs both classes");
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline MetricsReport evaluate_predictions(std::span<const int> y_true, std::span<const int> y_pred,
                                          std::span<const double> scores, std::string classifier = {},
                                          int option = 0) {
  MetricsReport report;
  report.classifier = std::move(classifier);
  report.option = option;
  report.confusion = confusion(y_true, y_pred);
  report.precision = precision(report.confusion);
  report.recall = recall(report.confusion);
  report.f1 = f1_score(report.confusion);
  report.balanced_accuracy = balanced_accuracy(report.confusion);
  report.auc = auc_roc(y_true, scores);
  return report;
}

}  // namespace embedviz

#endif  // EMBEDVIZ_METRICS_HPP_
