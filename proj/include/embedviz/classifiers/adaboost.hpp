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

#ifndef EMBEDVIZ_CLASSIFIERS_ADABOOST_HPP_
#define EMBEDVIZ_CLASSIFIERS_ADABOOST_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "embedviz/classifiers/tree.hpp"

namespace embedviz {

struct AdaBoostParams {
  std::size_t n_estimators = 50;
};

inline constexpr double kBoostErrorClamp = 1e-10;

// alpha = 0.5 ln((1 - error) / error); negative for worse-than-chance learners.
inline double adaboost_stage_weight(double error) {
  if (!(error > 0.0 && error < 1.0)) {
    throw Error(ErrorKind::kDegenerateError, "weighted error must lie in (0, 1)");
  }
  return 0.5 * std::log((1.0 - error) / error);
}

// Discrete AdaBoost over depth-1 Gini stumps. Score = sum_t alpha_t h_t(x)
// with h_t in {-1, +1}; stops early once a stump is perfect.
class AdaBoostModel {
 public:
  static AdaBoostModel fit(const Dataset& train, const AdaBoostParams& params) {
    detail::require(params.n_estimators >= 1, ErrorKind::kInvalidArgument, "n_estimators must be >= 1");
    const std::size_t n = train.size();
    const auto y = train.labels();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<int> h(n);
    AdaBoostModel m;
    for (std::size_t t = 0; t < params.n_estimators; ++t) {
      auto stump = DecisionTreeModel::fit_weighted(train.samples(), y, w, 1, 2, train.dim(), nullptr);
      double err = 0.0, total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        h[i] = vote(stump, train.samples().row(i));
        total += w[i];
        if (h[i] != y[i]) err += w[i];
      }
      err /= total;
      const double alpha =
          adaboost_stage_weight(std::clamp(err, kBoostErrorClamp, 1.0 - kBoostErrorClamp));
      m.stumps_.push_back(std::move(stump));
      m.alphas_.push_back(alpha);
      if (err <= 0.0) break;
      double norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] *= std::exp(-alpha * y[i] * h[i]);
        norm += w[i];
      }
      for (auto& wi : w) wi /= norm;
    }
    return m;
  }

  double score(std::span<const double> query) const {
    double sum = 0.0;
    for (std::size_t t = 0; t < stumps_.size(); ++t) sum += alphas_[t] * vote(stumps_[t], query);
    return sum;
  }

  static constexpr double threshold() { return 0.0; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<DecisionTreeModel>& stumps() const { return stumps_; }

  void save(std::ostream& out) const {
    out << "stages " << stumps_.size() << '\n';
    for (std::size_t t = 0; t < stumps_.size(); ++t) {
      model_io::put(out, alphas_[t]);
      out << '\n';
      stumps_[t].save(out);
    }
  }
  static AdaBoostModel load(std::istream& in, std::size_t dim) {
    AdaBoostModel m;
    model_io::expect(in, "stages");
    const auto count = model_io::get_size(in);
    for (std::size_t t = 0; t < count; ++t) {
      m.alphas_.push_back(model_io::get_double(in));
      m.stumps_.push_back(DecisionTreeModel::load(in, dim));
    }
    return m;
  }

 private:
  static int vote(const DecisionTreeModel& stump, std::span<const double> x) {
    return stump.score(x) >= 0.5 ? kFailed : kSafe;
  }

  std::vector<DecisionTreeModel> stumps_;
  std::vector<double> alphas_;
};

}  // namespace embedviz

#endif  // EMBEDVIZ_CLASSIFIERS_ADABOOST_HPP_
