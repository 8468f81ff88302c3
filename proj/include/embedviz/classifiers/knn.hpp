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

#ifndef EMBEDVIZ_CLASSIFIERS_KNN_HPP_
#define EMBEDVIZ_CLASSIFIERS_KNN_HPP_

#include <algorithm>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "embedviz/classifiers/io.hpp"
#include "embedviz/data.hpp"

namespace embedviz {

struct KnnParams {
  std::size_t k = 3;
};

// Stores the training set; the score is the fraction of +1 labels among the
// k nearest training rows (distance ties go to the lower row index).
class KnnModel {
 public:
  static KnnModel fit(const Dataset& train, const KnnParams& params) {
    detail::require(params.k >= 1, ErrorKind::kInvalidArgument, "k must be >= 1");
    detail::require(train.size() >= 1, ErrorKind::kInvalidArgument, "KNN needs training rows");
    KnnModel m;
    m.k_ = std::min(params.k, train.size());
    m.x_ = train.samples();
    m.y_.assign(train.labels().begin(), train.labels().end());
    return m;
  }

  double score(std::span<const double> query) const {
    std::vector<std::pair<double, std::size_t>> best;
    best.reserve(k_ + 1);
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      const double d = squared_distance(query, x_.row(i));
      if (best.size() == k_ && d >= best.back().first) continue;
      auto pos = std::upper_bound(best.begin(), best.end(), std::make_pair(d, i));
      best.insert(pos, {d, i});
      if (best.size() > k_) best.pop_back();
    }
    std::size_t positives = 0;
    for (const auto& [d, i] : best) positives += y_[i] == kFailed ? 1 : 0;
    return static_cast<double>(positives) / static_cast<double>(best.size());
  }

  static constexpr double threshold() { return 0.5; }
  std::size_t k() const { return k_; }

  void save(std::ostream& out) const {
    out << "k " << k_ << '\n';
    model_io::put_matrix(out, x_);
    for (int label : y_) out << label << ' ';
    out << '\n';
  }

  static KnnModel load(std::istream& in) {
    KnnModel m;
    model_io::expect(in, "k");
    m.k_ = model_io::get_size(in);
    m.x_ = model_io::get_matrix(in);
    m.y_.resize(m.x_.rows());
    for (auto& label : m.y_) label = static_cast<int>(model_io::get_int(in));
    return m;
  }

 private:
  std::size_t k_ = 3;
  Matrix x_;
  std::vector<int> y_;
};

}  // namespace embedviz

#endif  // EMBEDVIZ_CLASSIFIERS_KNN_HPP_
