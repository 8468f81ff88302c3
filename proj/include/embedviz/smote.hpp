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

#ifndef EMBEDVIZ_SMOTE_HPP_
#define EMBEDVIZ_SMOTE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "embedviz/data.hpp"
#include "embedviz/error.hpp"
#include "embedviz/random.hpp"

namespace embedviz {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::uint64_t seed = 42;
  // minority / majority count after resampling, in (0, 1].
  double target_ratio = 1.0;
};

struct SmoteResult {
  Dataset data;  // original rows first, synthetic minority rows appended
  std::size_t synthesized = 0;
  std::size_t k_used = 0;
  int minority_label = kFailed;
  std::vector<std::string> warnings;
};

// Indices (into members) of the k nearest members of each member, ordered by
// (distance, index).
inline std::vector<std::vector<std::size_t>> nearest_within(const Matrix& x,
                                                            std::span<const std::size_t> members,
                                                            std::size_t k) {
  const std::size_t m = members.size();
  std::vector<std::vector<std::size_t>> out(m);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t a = 0; a < m; ++a) {
    cand.clear();
    for (std::size_t b = 0; b < m; ++b) {
      if (b != a) cand.emplace_back(squared_distance(x.row(members[a]), x.row(members[b])), b);
    }
    const auto kk = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
    for (std::size_t t = 0; t < kk; ++t) out[a].push_back(cand[t].second);
  }
  return out;
}

// Appends x + u (x_nn - x) rows for minority donors taken round-robin, with
// x_nn drawn uniformly from the donor's k nearest minority neighbours.
inline SmoteResult smote_oversample_detailed(const Dataset& train, const SmoteConfig& cfg) {
  detail::require(cfg.k_neighbors >= 1, ErrorKind::kInvalidArgument, "k_neighbors must be >= 1");
  detail::require(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0, ErrorKind::kInvalidArgument,
                  "target_ratio must be in (0, 1]");
  const std::size_t n_pos = train.count(kFailed);
  const std::size_t n_neg = train.count(kSafe);
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::kSingleClass, "SMOTE needs both classes");

  SmoteResult result;
  result.minority_label = n_pos <= n_neg ? kFailed : kSafe;
  const std::size_t minority = std::min(n_pos, n_neg);
  const std::size_t majority = std::max(n_pos, n_neg);
  if (minority < 2) {
    throw Error(ErrorKind::kInsufficientMinority, "SMOTE needs at least 2 minority samples");
  }
  result.k_used = cfg.k_neighbors;
  if (result.k_used > minority - 1) {
    result.k_used = minority - 1;
    result.warnings.push_back("k_neighbors clamped from " + std::to_string(cfg.k_neighbors) +
                              " to " + std::to_string(result.k_used));
  }

  const auto target = static_cast<std::size_t>(
      std::floor(cfg.target_ratio * static_cast<double>(majority) + 0.5));
  const std::size_t quota = target > minority ? target - minority : 0;
  result.synthesized = quota;

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.labels()[i] == result.minority_label) members.push_back(i);
  }

  const Matrix& x = train.samples();
  Matrix out = x;
  std::vector<int> labels(train.labels().begin(), train.labels().end());
  if (quota > 0) {
    const auto neighbours = nearest_within(x, members, result.k_used);
    Rng rng(cfg.seed);
    std::vector<double> row(x.cols());
    for (std::size_t s = 0; s < quota; ++s) {
      const std::size_t donor = s % members.size();
      const auto& nn = neighbours[donor];
      const std::size_t partner = members[nn[static_cast<std::size_t>(rng.below(nn.size()))]];
      const double u = rng.uniform();
      const auto base = x.row(members[donor]);
      const auto other = x.row(partner);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = base[c] + u * (other[c] - base[c]);
      out.append_row(row);
      labels.push_back(result.minority_label);
    }
  }
  result.data = Dataset(std::move(out), std::move(labels), train.feature_names());
  return result;
}

inline Dataset smote_oversample(const Dataset& train, const SmoteConfig& cfg) {
  return smote_oversample_detailed(train, cfg).data;
}

}  // namespace embedviz

#endif  // EMBEDVIZ_SMOTE_HPP_
