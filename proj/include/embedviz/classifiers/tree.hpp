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

#ifndef EMBEDVIZ_CLASSIFIERS_TREE_HPP_
#define EMBEDVIZ_CLASSIFIERS_TREE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <tuple>
#include <vector>

#include "embedviz/classifiers/io.hpp"
#include "embedviz/data.hpp"
#include "embedviz/random.hpp"

namespace embedviz {

struct TreeParams {
  std::size_t max_depth = 5;
  std::size_t min_split = 2;
};

struct ForestParams {
  std::size_t max_depth = 5;
  std::size_t n_estimators = 10;
  std::size_t max_features = 1;
  bool bootstrap = true;
  std::uint64_t seed = 42;
  std::size_t min_split = 2;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;     // x[feature] <= threshold
  int right = -1;
  double positive_fraction = 0.0;  // weighted share of +1 among node samples

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

namespace detail {

struct SplitCandidate {
  double impurity;  // weighted child Gini, sum over children of W_c * gini_c
  std::size_t feature;
  double threshold;

  bool better_than(const SplitCandidate& other) const {
    return std::tie(impurity, feature, threshold) <
           std::tie(other.impurity, other.feature, other.threshold);
  }
};

// W * gini for a node holding weight w_pos of +1 and w_neg of -1.
inline double weighted_gini(double w_pos, double w_neg) {
  const double w = w_pos + w_neg;
  return w > 0.0 ? w - (w_pos * w_pos + w_neg * w_neg) / w : 0.0;
}

// Greedy CART builder over weighted rows. Exhaustive midpoint thresholds,
// Gini criterion, ties to the lower feature index and then lower threshold.
// With max_features < d, features are visited in random order until
// max_features non-constant ones have been scored.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::span<const double> weights,
              std::size_t max_depth, std::size_t min_split, std::size_t max_features, Rng* rng)
      : x_(x), y_(y), w_(weights), max_depth_(max_depth), min_split_(min_split),
        max_features_(std::min(max_features, x.cols())), rng_(rng) {}

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    nodes_.clear();
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    double w_pos = 0.0, w_neg = 0.0;
    for (auto r : rows) (y_[r] == kFailed ? w_pos : w_neg) += w_[r];
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[id].positive_fraction = w_pos + w_neg > 0.0 ? w_pos / (w_pos + w_neg) : 0.0;
    if (depth >= max_depth_ || rows.size() < min_split_ || w_pos == 0.0 || w_neg == 0.0) return id;

    const auto split = best_split(rows);
    if (!split) return id;
    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_(r, split->feature) <= split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = static_cast<int>(split->feature);
    nodes_[id].threshold = split->threshold;
    const int l = grow(std::move(left), depth + 1);
    nodes_[id].left = l;
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].right = r;
    return id;
  }

  std::optional<SplitCandidate> best_split(std::span<const std::size_t> rows) {
    std::vector<std::size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    const bool sampled = max_features_ < x_.cols();
    if (sampled) rng_->shuffle(std::span<std::size_t>(features));

    std::optional<SplitCandidate> best;
    std::size_t scored = 0;
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (auto f : features) {
      if (sampled && scored >= max_features_) break;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x_(a, f) < x_(b, f) || (x_(a, f) == x_(b, f) && a < b);
      });
      if (x_(order.front(), f) == x_(order.back(), f)) continue;
      ++scored;
      double total_pos = 0.0, total_neg = 0.0;
      for (auto r : order) (y_[r] == kFailed ? total_pos : total_neg) += w_[r];
      double left_pos = 0.0, left_neg = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        (y_[order[k]] == kFailed ? left_pos : left_neg) += w_[order[k]];
        const double lo = x_(order[k], f), hi = x_(order[k + 1], f);
        if (lo == hi) continue;
        double threshold = lo + (hi - lo) / 2.0;
        if (threshold >= hi) threshold = lo;
        const SplitCandidate cand{
            weighted_gini(left_pos, left_neg) +
                weighted_gini(total_pos - left_pos, total_neg - left_neg),
            f, threshold};
        if (!best || cand.better_than(*best)) best = cand;
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::span<const double> w_;
  std::size_t max_depth_;
  std::size_t min_split_;
  std::size_t max_features_;
  Rng* rng_;
  std::vector<TreeNode> nodes_;
};

inline void save_nodes(std::ostream& out, const std::vector<TreeNode>& nodes) {
  out << "nodes " << nodes.size() << '\n';
  for (const auto& n : nodes) {
    out << n.feature << ' ';
    model_io::put(out, n.threshold);
    out << ' ' << n.left << ' ' << n.right << ' ';
    model_io::put(out, n.positive_fraction);
    out << '\n';
  }
}

inline std::vector<TreeNode> load_nodes(std::istream& in, std::size_t dim) {
  model_io::expect(in, "nodes");
  std::vector<TreeNode> nodes(model_io::get_size(in));
  for (auto& n : nodes) {
    n.feature = static_cast<int>(model_io::get_int(in));
    n.threshold = model_io::get_double(in);
    n.left = static_cast<int>(model_io::get_int(in));
    n.right = static_cast<int>(model_io::get_int(in));
    n.positive_fraction = model_io::get_double(in);
  }
  const auto count = static_cast<int>(nodes.size());
  for (const auto& n : nodes) {
    if (n.feature >= 0 && (static_cast<std::size_t>(n.feature) >= dim || n.left <= 0 ||
                           n.right <= 0 || n.left >= count || n.right >= count)) {
      throw Error(ErrorKind::kBadModelFile, "corrupt tree node");
    }
  }
  if (nodes.empty()) throw Error(ErrorKind::kBadModelFile, "empty tree");
  return nodes;
}

}  // namespace detail

class DecisionTreeModel {
 public:
  static DecisionTreeModel fit(const Dataset& train, const TreeParams& params) {
    std::vector<double> w(train.size(), 1.0);
    return fit_weighted(train.samples(), train.labels(), w, params.max_depth, params.min_split,
                        train.dim(), nullptr);
  }

  // Rows with zero weight are ignored.
  static DecisionTreeModel fit_weighted(const Matrix& x, std::span<const int> y,
                                        std::span<const double> weights, std::size_t max_depth,
                                        std::size_t min_split, std::size_t max_features, Rng* rng) {
    detail::require(max_depth >= 1 && max_features >= 1, ErrorKind::kInvalidArgument,
                    "tree depth and max_features must be >= 1");
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (weights[i] > 0.0) rows.push_back(i);
    }
    detail::require(!rows.empty(), ErrorKind::kInvalidArgument, "tree needs weighted rows");
    detail::TreeBuilder builder(x, y, weights, max_depth, min_split, max_features, rng);
    DecisionTreeModel m;
    m.nodes_ = builder.build(std::move(rows));
    return m;
  }

  double score(std::span<const double> query) const {
    std::size_t id = 0;
    while (nodes_[id].feature >= 0) {
      const auto& node = nodes_[id];
      id = static_cast<std::size_t>(query[static_cast<std::size_t>(node.feature)] <= node.threshold
                                        ? node.left
                                        : node.right);
    }
    return nodes_[id].positive_fraction;
  }

  static constexpr double threshold() { return 0.5; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  std::size_t depth() const { return depth_from(0); }

  void save(std::ostream& out) const { detail::save_nodes(out, nodes_); }
  static DecisionTreeModel load(std::istream& in, std::size_t dim) {
    DecisionTreeModel m;
    m.nodes_ = detail::load_nodes(in, dim);
    return m;
  }

  friend bool operator==(const DecisionTreeModel&, const DecisionTreeModel&) = default;

 private:
  std::size_t depth_from(std::size_t id) const {
    const auto& n = nodes_[id];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(n.left)),
                        depth_from(static_cast<std::size_t>(n.right)));
  }

  std::vector<TreeNode> nodes_;
};

// Bagged trees; each tree draws its bootstrap sample and split features from
// its own seed derived from ForestParams::seed. Score = mean leaf fraction.
class RandomForestModel {
 public:
  static RandomForestModel fit(const Dataset& train, const ForestParams& params) {
    detail::require(params.n_estimators >= 1, ErrorKind::kInvalidArgument, "n_estimators must be >= 1");
    const std::size_t n = train.size();
    RandomForestModel m;
    for (std::size_t t = 0; t < params.n_estimators; ++t) {
      Rng rng(derive_seed(params.seed, t));
      std::vector<double> weights(n, params.bootstrap ? 0.0 : 1.0);
      if (params.bootstrap) {
        for (std::size_t draw = 0; draw < n; ++draw) weights[static_cast<std::size_t>(rng.below(n))] += 1.0;
      }
      m.trees_.push_back(DecisionTreeModel::fit_weighted(train.samples(), train.labels(), weights,
                                                         params.max_depth, params.min_split,
                                                         params.max_features, &rng));
    }
    return m;
  }

  double score(std::span<const double> query) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.score(query);
    return sum / static_cast<double>(trees_.size());
  }

  static constexpr double threshold() { return 0.5; }
  const std::vector<DecisionTreeModel>& trees() const { return trees_; }

  void save(std::ostream& out) const {
    out << "trees " << trees_.size() << '\n';
    for (const auto& t : trees_) t.save(out);
  }
  static RandomForestModel load(std::istream& in, std::size_t dim) {
    RandomForestModel m;
    model_io::expect(in, "trees");
    const auto count = model_io::get_size(in);
    if (count == 0) throw Error(ErrorKind::kBadModelFile, "forest without trees");
    for (std::size_t t = 0; t < count; ++t) m.trees_.push_back(DecisionTreeModel::load(in, dim));
    return m;
  }

  friend bool operator==(const RandomForestModel&, const RandomForestModel&) = default;

 private:
  std::vector<DecisionTreeModel> trees_;
};

}  // namespace embedviz

#endif  // EMBEDVIZ_CLASSIFIERS_TREE_HPP_
